#include "node.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace mas::expr::detail {

const char* fn_name(Fn fn) {
    switch (fn) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Exp: return "exp";
        case Fn::Log: return "log";
        case Fn::Sqrt: return "sqrt";
    }
    return "?";
}

NodePtr make_const(double v, std::string name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = v;
    n->const_name = std::move(name);
    return n;
}

NodePtr make_var(int index) {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->var = index;
    n->deps = std::uint64_t{1} << index;
    return n;
}

NodePtr make_unary(Op op, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->deps = a->deps;
    n->kids.push_back(std::move(a));
    return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->deps = a->deps | b->deps;
    n->kids.push_back(std::move(a));
    n->kids.push_back(std::move(b));
    return n;
}

NodePtr make_pow(NodePtr a, int e) {
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->exponent = e;
    n->deps = a->deps;
    n->kids.push_back(std::move(a));
    return n;
}

NodePtr make_func(Fn fn, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->op = Op::Func;
    n->fn = fn;
    n->deps = a->deps;
    n->kids.push_back(std::move(a));
    return n;
}

NodePtr make_deriv(NodePtr a, std::vector<int> vars) {
    std::sort(vars.begin(), vars.end());
    auto n = std::make_shared<Node>();
    n->op = Op::Deriv;
    n->vars = std::move(vars);
    n->deps = a->deps;
    n->kids.push_back(std::move(a));
    return n;
}

NodePtr make_compose(const Chart& inner_chart, NodePtr inner, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->op = Op::Compose;
    n->inner_chart = inner_chart;
    std::uint64_t deps = 0;
    for (std::size_t i = 0; i < args.size(); ++i)
        if (inner->deps & (std::uint64_t{1} << i)) deps |= args[i]->deps;
    n->deps = deps;
    n->kids.push_back(std::move(inner));
    for (auto& a : args) n->kids.push_back(std::move(a));
    return n;
}

bool is_const(const NodePtr& a, double v) { return a->op == Op::Const && a->value == v; }

namespace {

NodePtr fold_or(double v, const NodePtr& fallback) {
    if (std::isfinite(v)) return make_const(v);
    return fallback;
}

}  // namespace

NodePtr add(const NodePtr& a, const NodePtr& b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return fold_or(a->value + b->value, make_binary(Op::Add, a, b));
    if (b->op == Op::Neg) return sub(a, b->kids[0]);
    return make_binary(Op::Add, a, b);
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(b);
    if (a->op == Op::Const && b->op == Op::Const) return fold_or(a->value - b->value, make_binary(Op::Sub, a, b));
    if (b->op == Op::Neg) return add(a, b->kids[0]);
    return make_binary(Op::Sub, a, b);
}

NodePtr neg(const NodePtr& a) {
    if (a->op == Op::Const) return make_const(-a->value);
    if (a->op == Op::Neg) return a->kids[0];
    return make_unary(Op::Neg, a);
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a, -1.0)) return neg(b);
    if (is_const(b, -1.0)) return neg(a);
    if (a->op == Op::Const && b->op == Op::Const) return fold_or(a->value * b->value, make_binary(Op::Mul, a, b));
    if (a->op == Op::Neg && b->op == Op::Neg) return mul(a->kids[0], b->kids[0]);
    if (a->op == Op::Neg) return neg(mul(a->kids[0], b));
    if (b->op == Op::Neg) return neg(mul(a, b->kids[0]));
    return make_binary(Op::Mul, a, b);
}

NodePtr div(const NodePtr& a, const NodePtr& b) {
    if (is_const(a, 0.0) && b->op == Op::Const && b->value != 0.0) return make_const(0.0);
    if (is_const(b, 1.0)) return a;
    if (is_const(b, -1.0)) return neg(a);
    if (a->op == Op::Const && b->op == Op::Const && b->value != 0.0)
        return fold_or(a->value / b->value, make_binary(Op::Div, a, b));
    return make_binary(Op::Div, a, b);
}

NodePtr pow(const NodePtr& a, int n) {
    if (n == 1) return a;
    if (n == 0) return make_const(1.0);
    if (a->op == Op::Const) {
        const double p = ipow_positive(a->value, n < 0 ? -n : n, 1.0, [](double x, double y) { return x * y; });
        if (n > 0) return fold_or(p, make_pow(a, n));
        if (p != 0.0) return fold_or(1.0 / p, make_pow(a, n));
    }
    return make_pow(a, n);
}

NodePtr func(Fn fn, const NodePtr& a) { return make_func(fn, a); }

NodePtr differentiate(const NodePtr& a, int var) {
    if (!(a->deps & (std::uint64_t{1} << var))) return make_const(0.0);
    switch (a->op) {
        case Op::Const: return make_const(0.0);
        case Op::Var: return make_const(a->var == var ? 1.0 : 0.0);
        case Op::Add: return add(differentiate(a->kids[0], var), differentiate(a->kids[1], var));
        case Op::Sub: return sub(differentiate(a->kids[0], var), differentiate(a->kids[1], var));
        case Op::Neg: return neg(differentiate(a->kids[0], var));
        case Op::Mul: {
            const std::uint64_t bit = std::uint64_t{1} << var;
            if (!(a->kids[0]->deps & bit)) return mul(a->kids[0], differentiate(a->kids[1], var));
            if (!(a->kids[1]->deps & bit)) return mul(differentiate(a->kids[0], var), a->kids[1]);
            break;
        }
        case Op::Div: {
            const std::uint64_t bit = std::uint64_t{1} << var;
            if (!(a->kids[1]->deps & bit)) return div(differentiate(a->kids[0], var), a->kids[1]);
            break;
        }
        case Op::Deriv: {
            auto vars = a->vars;
            vars.push_back(var);
            return make_deriv(a->kids[0], std::move(vars));
        }
        default: break;
    }
    return make_deriv(a, {var});
}

bool contains_deriv(const NodePtr& a) {
    if (a->op == Op::Deriv) return true;
    if (a->op == Op::Compose) return true;
    for (const auto& k : a->kids)
        if (contains_deriv(k)) return true;
    return false;
}

NodePtr substitute(const NodePtr& a, const std::vector<NodePtr>& args) {
    switch (a->op) {
        case Op::Const: return a;
        case Op::Var: return args.at(static_cast<std::size_t>(a->var));
        case Op::Add: return add(substitute(a->kids[0], args), substitute(a->kids[1], args));
        case Op::Sub: return sub(substitute(a->kids[0], args), substitute(a->kids[1], args));
        case Op::Mul: return mul(substitute(a->kids[0], args), substitute(a->kids[1], args));
        case Op::Div: return div(substitute(a->kids[0], args), substitute(a->kids[1], args));
        case Op::Neg: return neg(substitute(a->kids[0], args));
        case Op::Pow: return pow(substitute(a->kids[0], args), a->exponent);
        case Op::Func: return func(a->fn, substitute(a->kids[0], args));
        case Op::Deriv:
        case Op::Compose: break;
    }
    throw std::logic_error("substitute: tree contains derivative markers");
}

bool structurally_equal(const Node& a, const Node& b) {
    if (&a == &b) return true;
    if (a.op != b.op || a.kids.size() != b.kids.size()) return false;
    switch (a.op) {
        case Op::Const:
            if (a.value != b.value) return false;
            break;
        case Op::Var:
            if (a.var != b.var) return false;
            break;
        case Op::Pow:
            if (a.exponent != b.exponent) return false;
            break;
        case Op::Func:
            if (a.fn != b.fn) return false;
            break;
        case Op::Deriv:
            if (a.vars != b.vars) return false;
            break;
        case Op::Compose:
            if (!(a.inner_chart == b.inner_chart)) return false;
            break;
        default: break;
    }
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!structurally_equal(*a.kids[i], *b.kids[i])) return false;
    return true;
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw std::runtime_error("format_number failed");
    return std::string(buf.data(), ptr);
}

namespace {

void render_into(const Node& n, const Chart& chart, std::string& out);

void render_compose(const Node& n, const Chart& outer, std::string& out) {
    // Composed trees without derivative markers are substituted eagerly and
    // never reach here; this form is descriptive only.
    out += "compose(";
    const Chart& inner = n.inner_chart;
    render_into(*n.kids[0], inner, out);
    out += ";";
    for (std::size_t i = 1; i < n.kids.size(); ++i) {
        if (i > 1) out += ",";
        out += inner.name(i - 1);
        out += "=";
        render_into(*n.kids[i], outer, out);
    }
    out += ")";
}

void render_into(const Node& n, const Chart& chart, std::string& out) {
    switch (n.op) {
        case Op::Const: {
            const bool shadowed = !n.const_name.empty() && chart.index_of(n.const_name).has_value();
            if (!n.const_name.empty() && !shadowed) {
                out += n.const_name;
            } else if (n.value < 0 || (n.value == 0.0 && std::signbit(n.value))) {
                out += "(-" + format_number(-n.value) + ")";
            } else {
                out += format_number(n.value);
            }
            return;
        }
        case Op::Var:
            if (static_cast<std::size_t>(n.var) < chart.dim())
                out += chart.name(static_cast<std::size_t>(n.var));
            else
                out += "#" + std::to_string(n.var);
            return;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : '/';
            out += "(";
            render_into(*n.kids[0], chart, out);
            out += sym;
            render_into(*n.kids[1], chart, out);
            out += ")";
            return;
        }
        case Op::Neg:
            out += "(-";
            render_into(*n.kids[0], chart, out);
            out += ")";
            return;
        case Op::Pow:
            out += "(";
            render_into(*n.kids[0], chart, out);
            out += "^";
            if (n.exponent < 0)
                out += "(-" + std::to_string(-n.exponent) + ")";
            else
                out += std::to_string(n.exponent);
            out += ")";
            return;
        case Op::Func:
            out += fn_name(n.fn);
            out += "(";
            render_into(*n.kids[0], chart, out);
            out += ")";
            return;
        case Op::Deriv:
            out += "diff(";
            render_into(*n.kids[0], chart, out);
            for (int v : n.vars) {
                out += ",";
                out += static_cast<std::size_t>(v) < chart.dim() ? chart.name(static_cast<std::size_t>(v))
                                                                 : "#" + std::to_string(v);
            }
            out += ")";
            return;
        case Op::Compose: render_compose(n, chart, out); return;
    }
}

}  // namespace

std::string render(const Node& n, const Chart& chart) {
    std::string out;
    render_into(n, chart, out);
    return out;
}

}  // namespace mas::expr::detail
