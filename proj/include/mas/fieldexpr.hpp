#pragma once

// Coefficient-expression language.
//
// A ScalarField is an immutable expression tree over the coordinates of a
// Chart. Fields are evaluated together with their exact partial derivatives
// by truncated multivariate Taylor arithmetic (nested forward mode), so no
// finite-difference truncation error enters any downstream check.
//
// Grammar (whitespace ignored, byte offsets reported 0-based):
//
//   expr    := term   { ('+' | '-') term }
//   term    := unary  { ('*' | '/') unary }
//   unary   := '-' unary | power
//   power   := primary [ '^' unary ]            (right-associative, exponent
//                                                must fold to an integer)
//   primary := number | name | name '(' args ')' | '(' expr ')'
//   args    := expr { ',' expr }
//   number  := digits [ '.' digits ] [ ('e'|'E') ['+'|'-'] digits ]
//
// Names resolve first to chart coordinates, then to the constants `pi` and
// `e`. Functions: sin, cos, exp, log, sqrt (one argument) and
// diff(expr, v1, ..., vk), the k-th mixed partial of expr.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mas::expr {

inline constexpr int kMaxJetOrder = 4;

class Chart {
  public:
    Chart() = default;
    explicit Chart(std::vector<std::string> names);

    [[nodiscard]] std::size_t dim() const { return names_ ? names_->size() : 0; }
    [[nodiscard]] const std::vector<std::string>& names() const;
    [[nodiscard]] const std::string& name(std::size_t i) const { return names().at(i); }
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;
    /// Like index_of but throws std::invalid_argument for unknown names.
    [[nodiscard]] std::size_t require(std::string_view name) const;

    friend bool operator==(const Chart& a, const Chart& b);

  private:
    std::shared_ptr<const std::vector<std::string>> names_;
};

/// Failure to turn source text into a field. `offset` is a 0-based byte
/// offset into the source.
class ParseError : public std::runtime_error {
  public:
    enum class Kind { Syntax, UnknownIdentifier, Arity };
    ParseError(Kind kind, std::size_t offset, const std::string& what);
    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] std::size_t offset() const { return offset_; }

  private:
    Kind kind_;
    std::size_t offset_;
};

/// log/sqrt outside their domain, division by zero, or a non-finite result.
class DomainError : public std::runtime_error {
  public:
    DomainError(const std::string& subexpr, const std::string& what);
    [[nodiscard]] const std::string& subexpression() const { return subexpr_; }

  private:
    std::string subexpr_;
};

namespace detail {
struct Node;
class JetSpace;
}  // namespace detail

/// Value and partial derivatives of a field at one point. Partials are
/// addressed by the sorted list of coordinate indices being differentiated,
/// so {0, 1} and {1, 0} name the same mixed partial.
class Jet {
  public:
    Jet(std::shared_ptr<const detail::JetSpace> space, std::vector<double> taylor);

    [[nodiscard]] int order() const;
    [[nodiscard]] std::size_t dim() const;
    [[nodiscard]] double value() const { return taylor_.front(); }
    [[nodiscard]] double partial(std::vector<int> vars) const;
    [[nodiscard]] double d(int i) const { return partial({i}); }
    [[nodiscard]] double d(int i, int j) const { return partial({i, j}); }

    /// Taylor coefficients in the canonical graded monomial order.
    [[nodiscard]] const std::vector<double>& taylor() const { return taylor_; }

  private:
    std::shared_ptr<const detail::JetSpace> space_;
    std::vector<double> taylor_;
};

class ScalarField {
  public:
    ScalarField() = default;

    static ScalarField constant(const Chart& chart, double value);
    static ScalarField coordinate(const Chart& chart, std::size_t index);
    static ScalarField coordinate(const Chart& chart, std::string_view name);

    [[nodiscard]] const Chart& chart() const { return chart_; }
    [[nodiscard]] bool valid() const { return static_cast<bool>(root_); }

    /// Plain evaluation. Throws DomainError.
    [[nodiscard]] double evaluate(std::span<const double> point) const;
    /// Value and all partials of total order <= order (order <= kMaxJetOrder).
    [[nodiscard]] Jet eval_jet(std::span<const double> point, int order) const;

    [[nodiscard]] ScalarField derivative(std::size_t var) const;
    [[nodiscard]] ScalarField derivative(std::vector<int> vars) const;

    /// Substitute `args[i]` for coordinate i. All args must share one chart,
    /// which becomes the chart of the result.
    [[nodiscard]] ScalarField compose(const std::vector<ScalarField>& args) const;

    /// Fully parenthesised text that parses back to an identical tree.
    [[nodiscard]] std::string render() const;

    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] std::optional<double> constant_value() const;
    [[nodiscard]] bool depends_on(std::size_t var) const;
    [[nodiscard]] std::uint64_t dependency_mask() const;
    [[nodiscard]] bool structurally_equal(const ScalarField& other) const;

    [[nodiscard]] const std::shared_ptr<const detail::Node>& node() const { return root_; }
    ScalarField(Chart chart, std::shared_ptr<const detail::Node> root);

  private:
    Chart chart_;
    std::shared_ptr<const detail::Node> root_;
};

ScalarField parse(std::string_view src, const Chart& chart);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a);
ScalarField operator+(const ScalarField& a, double b);
ScalarField operator-(const ScalarField& a, double b);
ScalarField operator*(double a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, double b);
ScalarField operator/(const ScalarField& a, double b);
ScalarField operator+(double a, const ScalarField& b);
ScalarField operator-(double a, const ScalarField& b);
ScalarField operator/(double a, const ScalarField& b);

ScalarField pow(const ScalarField& a, int n);
ScalarField sin(const ScalarField& a);
ScalarField cos(const ScalarField& a);
ScalarField exp(const ScalarField& a);
ScalarField log(const ScalarField& a);
ScalarField sqrt(const ScalarField& a);
/// |a|^(1/2), written as sqrt(sqrt(a^2)); smooth wherever a != 0.
ScalarField sqrt_abs(const ScalarField& a);

}  // namespace mas::expr
