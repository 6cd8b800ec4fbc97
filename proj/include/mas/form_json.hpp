#pragma once

// JSON description of a differential form:
//   {"degree": k, "chart": [names], "terms": [{"index": [names], "coeff": "expr"}]}

#include "mas/exterior.hpp"

#include <json.hpp>

namespace mas::ext {

nlohmann::json to_json(const DifferentialForm& form);
/// Throws std::invalid_argument on malformed input and expr::ParseError on
/// bad coefficients.
DifferentialForm form_from_json(const nlohmann::json& j);

}  // namespace mas::ext
