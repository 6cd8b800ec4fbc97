#include "mas/form_json.hpp"

namespace mas::ext {

nlohmann::json to_json(const DifferentialForm& form) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [idx, c] : form.terms()) {
        nlohmann::json names = nlohmann::json::array();
        for (int i : idx) names.push_back(form.chart().name(static_cast<std::size_t>(i)));
        terms.push_back({{"index", names}, {"coeff", c.render()}});
    }
    return {{"degree", form.degree()}, {"chart", form.chart().names()}, {"terms", terms}};
}

DifferentialForm form_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("form: expected a JSON object");
    for (const char* key : {"degree", "chart", "terms"})
        if (!j.contains(key)) throw std::invalid_argument(std::string("form: missing '") + key + "'");
    if (!j["degree"].is_number_integer()) throw std::invalid_argument("form: 'degree' must be an integer");
    if (!j["chart"].is_array() || !j["terms"].is_array())
        throw std::invalid_argument("form: 'chart' and 'terms' must be arrays");
    std::vector<std::string> names;
    for (const auto& n : j["chart"]) {
        if (!n.is_string()) throw std::invalid_argument("form: chart names must be strings");
        names.push_back(n.get<std::string>());
    }
    const Chart chart(std::move(names));
    const int degree = j["degree"].get<int>();
    std::vector<std::pair<std::string, std::vector<std::string>>> terms;
    for (const auto& t : j["terms"]) {
        if (!t.is_object() || !t.contains("index") || !t.contains("coeff") || !t["index"].is_array())
            throw std::invalid_argument("form: each term needs 'index' and 'coeff'");
        std::vector<std::string> idx;
        for (const auto& n : t["index"]) {
            if (!n.is_string()) throw std::invalid_argument("form: index entries must be coordinate names");
            idx.push_back(n.get<std::string>());
        }
        if (static_cast<int>(idx.size()) != degree) throw std::invalid_argument("form: index length != degree");
        std::string coeff;
        if (t["coeff"].is_string())
            coeff = t["coeff"].get<std::string>();
        else if (t["coeff"].is_number())
            coeff = expr::ScalarField::constant(chart, t["coeff"].get<double>()).render();
        else
            throw std::invalid_argument("form: 'coeff' must be a string or number");
        terms.emplace_back(std::move(coeff), std::move(idx));
    }
    return DifferentialForm::from_terms(chart, degree, terms);
}

}  // namespace mas::ext
