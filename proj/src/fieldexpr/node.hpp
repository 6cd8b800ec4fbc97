#pragma once

#include "mas/fieldexpr.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mas::expr::detail {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Func, Deriv, Compose };
enum class Fn { Sin, Cos, Exp, Log, Sqrt };

using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Const;
    double value = 0.0;
    std::string const_name;   // "pi" / "e" for named constants
    int var = -1;             // Var
    int exponent = 0;         // Pow
    Fn fn = Fn::Sin;          // Func
    std::vector<int> vars;    // Deriv: sorted coordinate indices
    std::vector<NodePtr> kids;
    Chart inner_chart;        // Compose: chart of kids[0]; kids[1..] are the arguments
    std::uint64_t deps = 0;   // bit i set iff the value may depend on coordinate i
};

const char* fn_name(Fn fn);

NodePtr make_const(double v, std::string name = {});
NodePtr make_var(int index);
NodePtr make_unary(Op op, NodePtr a);
NodePtr make_binary(Op op, NodePtr a, NodePtr b);
NodePtr make_pow(NodePtr a, int n);
NodePtr make_func(Fn fn, NodePtr a);
NodePtr make_deriv(NodePtr a, std::vector<int> vars);
NodePtr make_compose(const Chart& inner_chart, NodePtr inner, std::vector<NodePtr> args);

/// Builders with light folding (constants, 0 and 1 identities).
NodePtr add(const NodePtr& a, const NodePtr& b);
NodePtr sub(const NodePtr& a, const NodePtr& b);
NodePtr mul(const NodePtr& a, const NodePtr& b);
NodePtr div(const NodePtr& a, const NodePtr& b);
NodePtr neg(const NodePtr& a);
NodePtr pow(const NodePtr& a, int n);
NodePtr func(Fn fn, const NodePtr& a);
NodePtr differentiate(const NodePtr& a, int var);
NodePtr substitute(const NodePtr& a, const std::vector<NodePtr>& args);
bool contains_deriv(const NodePtr& a);

bool is_const(const NodePtr& a, double v);
bool structurally_equal(const Node& a, const Node& b);

std::string render(const Node& n, const Chart& chart);
std::string format_number(double v);

/// Integer power by binary exponentiation; shared by the scalar and jet
/// evaluators so that order-0 jets reproduce plain evaluation exactly.
template <class T, class Mul>
T ipow_positive(T base, int n, T one, Mul&& mul) {
    T result = one;
    while (n > 0) {
        if (n & 1) result = mul(result, base);
        n >>= 1;
        if (n) base = mul(base, base);
    }
    return result;
}

}  // namespace mas::expr::detail
