#include "mas/fieldexpr.hpp"

#include "jet_space.hpp"
#include "node.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace mas::expr {

using detail::Fn;
using detail::JetSpace;
using detail::Node;
using detail::NodePtr;
using detail::Op;
using detail::TaylorJet;

// ---------------------------------------------------------------- Chart

Chart::Chart(std::vector<std::string> names) {
    if (names.empty()) throw std::invalid_argument("chart needs at least one coordinate");
    if (names.size() > 64) throw std::invalid_argument("chart has more than 64 coordinates");
    std::unordered_set<std::string> seen;
    for (const auto& n : names) {
        const bool ok = !n.empty() && std::isalpha(static_cast<unsigned char>(n[0])) &&
                        std::all_of(n.begin(), n.end(), [](char c) {
                            return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                        });
        if (!ok) throw std::invalid_argument("invalid coordinate name '" + n + "'");
        if (!seen.insert(n).second) throw std::invalid_argument("duplicate coordinate name '" + n + "'");
    }
    names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
}

const std::vector<std::string>& Chart::names() const {
    static const std::vector<std::string> empty;
    return names_ ? *names_ : empty;
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
    const auto& ns = names();
    for (std::size_t i = 0; i < ns.size(); ++i)
        if (ns[i] == name) return i;
    return std::nullopt;
}

std::size_t Chart::require(std::string_view name) const {
    if (auto i = index_of(name)) return *i;
    throw std::invalid_argument("unknown coordinate '" + std::string(name) + "'");
}

bool operator==(const Chart& a, const Chart& b) {
    return a.names_ == b.names_ || a.names() == b.names();
}

// ---------------------------------------------------------------- errors

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

DomainError::DomainError(const std::string& subexpr, const std::string& what)
    : std::runtime_error(what + " in '" + subexpr + "'"), subexpr_(subexpr) {}

// ---------------------------------------------------------------- Jet

Jet::Jet(std::shared_ptr<const detail::JetSpace> space, std::vector<double> taylor)
    : space_(std::move(space)), taylor_(std::move(taylor)) {}

int Jet::order() const { return space_->order(); }
std::size_t Jet::dim() const { return space_->nvars(); }

double Jet::partial(std::vector<int> vars) const {
    std::vector<std::uint8_t> e(space_->nvars(), 0);
    for (int v : vars) {
        if (v < 0 || static_cast<std::size_t>(v) >= e.size())
            throw std::out_of_range("partial: coordinate index out of range");
        ++e[static_cast<std::size_t>(v)];
    }
    if (static_cast<int>(vars.size()) > space_->order())
        throw std::out_of_range("partial: order exceeds jet order");
    const auto k = static_cast<std::size_t>(space_->index(e));
    return taylor_[k] * space_->factorial_weight(k);
}

// ---------------------------------------------------------------- evaluation

namespace {

// Kept out of line so the compiler cannot pair it with a neighbouring cos
// into sincos, whose rounding may differ from sin alone.
[[gnu::noinline]] double scalar_fn(Fn fn, double u) {
    switch (fn) {
        case Fn::Sin: return std::sin(u);
        case Fn::Cos: return std::cos(u);
        case Fn::Exp: return std::exp(u);
        case Fn::Log: return std::log(u);
        case Fn::Sqrt: return std::sqrt(u);
    }
    return 0.0;
}

std::vector<double> fn_derivatives(Fn fn, double u, int order) {
    std::vector<double> d(static_cast<std::size_t>(order) + 1);
    d[0] = scalar_fn(fn, u);
    if (order == 0) return d;
    switch (fn) {
        case Fn::Sin:
        case Fn::Cos: {
            const double s = fn == Fn::Sin ? d[0] : scalar_fn(Fn::Sin, u);
            const double c = fn == Fn::Cos ? d[0] : scalar_fn(Fn::Cos, u);
            const double cyc_sin[4] = {s, c, -s, -c};
            const double cyc_cos[4] = {c, -s, -c, s};
            for (int n = 1; n <= order; ++n) d[n] = fn == Fn::Sin ? cyc_sin[n % 4] : cyc_cos[n % 4];
            break;
        }
        case Fn::Exp:
            for (auto& x : d) x = d[0];
            break;
        case Fn::Log: {
            double f = 1.0;  // (n-1)!
            for (int n = 1; n <= order; ++n) {
                if (n > 1) f *= (n - 1);
                d[n] = ((n % 2) ? 1.0 : -1.0) * f / std::pow(u, n);
            }
            break;
        }
        case Fn::Sqrt: {
            double coef = 1.0;
            for (int n = 1; n <= order; ++n) {
                coef *= (0.5 - (n - 1));
                d[n] = coef * d[0] / std::pow(u, n);
            }
            break;
        }
    }
    return d;
}

void check_fn_domain(Fn fn, double u, int order, const Node& n, const Chart& chart) {
    if (fn == Fn::Log && !(u > 0.0))
        throw DomainError(detail::render(n, chart), "log of non-positive value " + detail::format_number(u));
    if (fn == Fn::Sqrt) {
        if (u < 0.0) throw DomainError(detail::render(n, chart), "sqrt of negative value " + detail::format_number(u));
        if (u == 0.0 && order > 0) throw DomainError(detail::render(n, chart), "sqrt is not differentiable at 0");
    }
}

class JetEvaluator {
  public:
    JetEvaluator(std::shared_ptr<const JetSpace> space, const Chart& chart, std::span<const double> point,
                 const std::vector<TaylorJet>* inputs)
        : space_(std::move(space)), chart_(chart), point_(point), inputs_(inputs) {}

    TaylorJet eval(const Node& n) {
        if (auto it = memo_.find(&n); it != memo_.end()) return it->second;
        TaylorJet r = compute(n);
        if (!detail::jet_finite(r)) throw DomainError(detail::render(n, chart_), "non-finite result");
        memo_.emplace(&n, r);
        return r;
    }

  private:
    std::shared_ptr<const JetSpace> space_;
    const Chart& chart_;
    std::span<const double> point_;
    const std::vector<TaylorJet>* inputs_;
    std::unordered_map<const Node*, TaylorJet> memo_;

    [[nodiscard]] int order() const { return space_->order(); }

    TaylorJet compute(const Node& n) {
        switch (n.op) {
            case Op::Const: return detail::jet_constant(space_, n.value);
            case Op::Var: {
                const auto i = static_cast<std::size_t>(n.var);
                if (inputs_) return (*inputs_)[i];
                return detail::jet_variable(space_, i, point_[i]);
            }
            case Op::Add: return detail::jet_add(eval(*n.kids[0]), eval(*n.kids[1]));
            case Op::Sub: return detail::jet_sub(eval(*n.kids[0]), eval(*n.kids[1]));
            case Op::Mul: return detail::jet_mul(eval(*n.kids[0]), eval(*n.kids[1]));
            case Op::Neg: return detail::jet_neg(eval(*n.kids[0]));
            case Op::Div: {
                auto a = eval(*n.kids[0]);
                auto b = eval(*n.kids[1]);
                if (b.value() == 0.0) throw DomainError(detail::render(n, chart_), "division by zero");
                return detail::jet_div(a, b);
            }
            case Op::Pow: {
                auto base = eval(*n.kids[0]);
                const int e = n.exponent;
                auto one = detail::jet_constant(space_, 1.0);
                auto p = detail::ipow_positive(base, e < 0 ? -e : e, one, detail::jet_mul);
                if (e >= 0) return p;
                if (p.value() == 0.0) throw DomainError(detail::render(n, chart_), "division by zero");
                return detail::jet_div(one, p);
            }
            case Op::Func: {
                auto a = eval(*n.kids[0]);
                check_fn_domain(n.fn, a.value(), order(), n, chart_);
                return detail::jet_apply(a, fn_derivatives(n.fn, a.value(), order()));
            }
            case Op::Deriv: return derivative(n);
            case Op::Compose: {
                std::vector<TaylorJet> args;
                args.reserve(n.kids.size() - 1);
                for (std::size_t i = 1; i < n.kids.size(); ++i) args.push_back(eval(*n.kids[i]));
                JetEvaluator inner(space_, n.inner_chart, {}, &args);
                return inner.eval(*n.kids[0]);
            }
        }
        throw std::logic_error("unknown node");
    }

    TaylorJet derivative(const Node& n) {
        const int lifted = order() + static_cast<int>(n.vars.size());
        if (lifted > detail::kMaxInternalOrder)
            throw DomainError(detail::render(n, chart_), "derivative order exceeds the supported maximum");
        std::vector<double> at(chart_.dim());
        if (inputs_) {
            for (std::size_t i = 0; i < at.size(); ++i) at[i] = (*inputs_)[i].value();
        } else {
            std::copy(point_.begin(), point_.end(), at.begin());
        }
        JetEvaluator sub(JetSpace::get(chart_.dim(), lifted), chart_, at, nullptr);
        TaylorJet p = sub.eval(*n.kids[0]);
        for (int v : n.vars) p = detail::jet_shift(p, static_cast<std::size_t>(v));
        p = detail::jet_truncate(p, order());
        if (!inputs_) return p;
        return detail::jet_compose(p, *inputs_, space_);
    }
};

class ScalarEvaluator {
  public:
    ScalarEvaluator(const Chart& chart, std::span<const double> point) : chart_(chart), point_(point) {}

    double eval(const Node& n) {
        if (auto it = memo_.find(&n); it != memo_.end()) return it->second;
        const double r = compute(n);
        if (!std::isfinite(r)) throw DomainError(detail::render(n, chart_), "non-finite result");
        memo_.emplace(&n, r);
        return r;
    }

  private:
    const Chart& chart_;
    std::span<const double> point_;
    std::unordered_map<const Node*, double> memo_;

    double compute(const Node& n) {
        switch (n.op) {
            case Op::Const: return n.value;
            case Op::Var: return point_[static_cast<std::size_t>(n.var)];
            case Op::Add: return eval(*n.kids[0]) + eval(*n.kids[1]);
            case Op::Sub: return eval(*n.kids[0]) - eval(*n.kids[1]);
            case Op::Mul: return eval(*n.kids[0]) * eval(*n.kids[1]);
            case Op::Neg: return -eval(*n.kids[0]);
            case Op::Div: {
                const double a = eval(*n.kids[0]);
                const double b = eval(*n.kids[1]);
                if (b == 0.0) throw DomainError(detail::render(n, chart_), "division by zero");
                return a / b;
            }
            case Op::Pow: {
                const double base = eval(*n.kids[0]);
                const int e = n.exponent;
                const double p = detail::ipow_positive(base, e < 0 ? -e : e, 1.0,
                                                       [](double x, double y) { return x * y; });
                if (e >= 0) return p;
                if (p == 0.0) throw DomainError(detail::render(n, chart_), "division by zero");
                return 1.0 / p;
            }
            case Op::Func: {
                const double a = eval(*n.kids[0]);
                check_fn_domain(n.fn, a, 0, n, chart_);
                return scalar_fn(n.fn, a);
            }
            case Op::Deriv: {
                // Same arithmetic as the order-0 jet path.
                JetEvaluator sub(JetSpace::get(chart_.dim(), static_cast<int>(n.vars.size())), chart_, point_,
                                 nullptr);
                TaylorJet p = sub.eval(*n.kids[0]);
                for (int v : n.vars) p = detail::jet_shift(p, static_cast<std::size_t>(v));
                return p.value();
            }
            case Op::Compose: {
                std::vector<double> args;
                args.reserve(n.kids.size() - 1);
                for (std::size_t i = 1; i < n.kids.size(); ++i) args.push_back(eval(*n.kids[i]));
                ScalarEvaluator inner(n.inner_chart, args);
                return inner.eval(*n.kids[0]);
            }
        }
        throw std::logic_error("unknown node");
    }
};

void check_point(const Chart& chart, std::span<const double> point) {
    if (point.size() != chart.dim())
        throw std::invalid_argument("point has " + std::to_string(point.size()) + " coordinates, chart has " +
                                    std::to_string(chart.dim()));
}

const Chart& common_chart(const ScalarField& a, const ScalarField& b) {
    if (!(a.chart() == b.chart())) throw std::invalid_argument("scalar fields live on different charts");
    return a.chart();
}

}  // namespace

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(Chart chart, std::shared_ptr<const detail::Node> root)
    : chart_(std::move(chart)), root_(std::move(root)) {}

ScalarField ScalarField::constant(const Chart& chart, double value) {
    return ScalarField(chart, detail::make_const(value));
}

ScalarField ScalarField::coordinate(const Chart& chart, std::size_t index) {
    if (index >= chart.dim()) throw std::out_of_range("coordinate index out of range");
    return ScalarField(chart, detail::make_var(static_cast<int>(index)));
}

ScalarField ScalarField::coordinate(const Chart& chart, std::string_view name) {
    return coordinate(chart, chart.require(name));
}

double ScalarField::evaluate(std::span<const double> point) const {
    check_point(chart_, point);
    ScalarEvaluator ev(chart_, point);
    return ev.eval(*root_);
}

Jet ScalarField::eval_jet(std::span<const double> point, int order) const {
    check_point(chart_, point);
    if (order < 0 || order > kMaxJetOrder) throw std::invalid_argument("jet order must be in 0..4");
    auto space = JetSpace::get(chart_.dim(), order);
    JetEvaluator ev(space, chart_, point, nullptr);
    auto t = ev.eval(*root_);
    return Jet(space, std::move(t.c));
}

ScalarField ScalarField::derivative(std::size_t var) const {
    if (var >= chart_.dim()) throw std::out_of_range("derivative: coordinate index out of range");
    return ScalarField(chart_, detail::differentiate(root_, static_cast<int>(var)));
}

ScalarField ScalarField::derivative(std::vector<int> vars) const {
    ScalarField r = *this;
    for (int v : vars) r = r.derivative(static_cast<std::size_t>(v));
    return r;
}

ScalarField ScalarField::compose(const std::vector<ScalarField>& args) const {
    if (args.size() != chart_.dim())
        throw std::invalid_argument("compose: expected " + std::to_string(chart_.dim()) + " arguments");
    if (args.empty()) throw std::invalid_argument("compose: no arguments");
    const Chart& outer = args.front().chart();
    std::vector<NodePtr> nodes;
    nodes.reserve(args.size());
    for (const auto& a : args) {
        if (!(a.chart() == outer)) throw std::invalid_argument("compose: arguments on different charts");
        nodes.push_back(a.root_);
    }
    if (!detail::contains_deriv(root_)) return ScalarField(outer, detail::substitute(root_, nodes));
    return ScalarField(outer, detail::make_compose(chart_, root_, std::move(nodes)));
}

std::string ScalarField::render() const { return detail::render(*root_, chart_); }

bool ScalarField::is_zero() const { return detail::is_const(root_, 0.0); }

std::optional<double> ScalarField::constant_value() const {
    if (root_->op == Op::Const) return root_->value;
    return std::nullopt;
}

bool ScalarField::depends_on(std::size_t var) const { return (root_->deps >> var) & 1U; }
std::uint64_t ScalarField::dependency_mask() const { return root_->deps; }

bool ScalarField::structurally_equal(const ScalarField& other) const {
    return chart_ == other.chart_ && detail::structurally_equal(*root_, *other.root_);
}

// ---------------------------------------------------------------- arithmetic

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return ScalarField(common_chart(a, b), detail::add(a.node(), b.node()));
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return ScalarField(common_chart(a, b), detail::sub(a.node(), b.node()));
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    return ScalarField(common_chart(a, b), detail::mul(a.node(), b.node()));
}
ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    return ScalarField(common_chart(a, b), detail::div(a.node(), b.node()));
}
ScalarField operator-(const ScalarField& a) { return ScalarField(a.chart(), detail::neg(a.node())); }

ScalarField operator+(const ScalarField& a, double b) { return a + ScalarField::constant(a.chart(), b); }
ScalarField operator-(const ScalarField& a, double b) { return a - ScalarField::constant(a.chart(), b); }
ScalarField operator*(double a, const ScalarField& b) { return ScalarField::constant(b.chart(), a) * b; }
ScalarField operator*(const ScalarField& a, double b) { return a * ScalarField::constant(a.chart(), b); }
ScalarField operator/(const ScalarField& a, double b) { return a / ScalarField::constant(a.chart(), b); }
ScalarField operator+(double a, const ScalarField& b) { return ScalarField::constant(b.chart(), a) + b; }
ScalarField operator-(double a, const ScalarField& b) { return ScalarField::constant(b.chart(), a) - b; }
ScalarField operator/(double a, const ScalarField& b) { return ScalarField::constant(b.chart(), a) / b; }

ScalarField pow(const ScalarField& a, int n) { return ScalarField(a.chart(), detail::pow(a.node(), n)); }
ScalarField sin(const ScalarField& a) { return ScalarField(a.chart(), detail::func(Fn::Sin, a.node())); }
ScalarField cos(const ScalarField& a) { return ScalarField(a.chart(), detail::func(Fn::Cos, a.node())); }
ScalarField exp(const ScalarField& a) { return ScalarField(a.chart(), detail::func(Fn::Exp, a.node())); }
ScalarField log(const ScalarField& a) { return ScalarField(a.chart(), detail::func(Fn::Log, a.node())); }
ScalarField sqrt(const ScalarField& a) { return ScalarField(a.chart(), detail::func(Fn::Sqrt, a.node())); }
ScalarField sqrt_abs(const ScalarField& a) {
    if (auto c = a.constant_value()) return ScalarField::constant(a.chart(), std::sqrt(std::fabs(*c)));
    return sqrt(sqrt(pow(a, 2)));
}

}  // namespace mas::expr
