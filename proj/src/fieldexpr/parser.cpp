#include "mas/fieldexpr.hpp"

#include "node.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace mas::expr {

using detail::Fn;
using detail::NodePtr;

namespace {

constexpr int kMaxNesting = 400;

class Parser {
  public:
    Parser(std::string_view src, const Chart& chart) : src_(src), chart_(chart) {}

    NodePtr parse_all() {
        skip_ws();
        if (pos_ >= src_.size()) fail(ParseError::Kind::Syntax, pos_, "empty expression");
        NodePtr e = expr();
        skip_ws();
        if (pos_ < src_.size()) fail(ParseError::Kind::Syntax, pos_, std::string("unexpected '") + src_[pos_] + "'");
        return e;
    }

  private:
    std::string_view src_;
    const Chart& chart_;
    std::size_t pos_ = 0;
    int depth_ = 0;

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > kMaxNesting) p.fail(ParseError::Kind::Syntax, p.pos_, "expression nested too deeply");
        }
        ~DepthGuard() { --p.depth_; }
    };

    [[noreturn]] void fail(ParseError::Kind kind, std::size_t at, const std::string& msg) const {
        throw ParseError(kind, at, msg);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            const std::string got = pos_ < src_.size() ? std::string("'") + src_[pos_] + "'" : "end of input";
            fail(ParseError::Kind::Syntax, pos_, std::string("expected '") + c + "', got " + got);
        }
    }

    NodePtr expr() {
        DepthGuard guard(*this);
        NodePtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = detail::add(lhs, term());
            else if (accept('-'))
                lhs = detail::sub(lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = detail::mul(lhs, unary());
            else if (accept('/'))
                lhs = detail::div(lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        DepthGuard guard(*this);
        if (accept('-')) return detail::neg(unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t at = pos_;
        NodePtr ex = unary();
        if (ex->op != detail::Op::Const || ex->value != std::trunc(ex->value) || std::fabs(ex->value) > 1e6)
            fail(ParseError::Kind::Syntax, at, "exponent must be an integer constant");
        return detail::pow(base, static_cast<int>(ex->value));
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail(ParseError::Kind::Syntax, pos_, "unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return name();
        fail(ParseError::Kind::Syntax, pos_, std::string("unexpected '") + c + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            const std::size_t s = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            return pos_ > s;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            if (!digits()) fail(ParseError::Kind::Syntax, pos_, "expected digits after '.'");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            // An 'e' not followed by an exponent is left for the caller (and
            // will be rejected as a juxtaposed identifier).
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                digits();
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        const double v = std::strtod(text.c_str(), nullptr);
        if (!std::isfinite(v)) fail(ParseError::Kind::Syntax, start, "number out of range");
        return detail::make_const(v);
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string id(src_.substr(start, pos_ - start));
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') return call(id, start);
        if (auto i = chart_.index_of(id)) return detail::make_var(static_cast<int>(*i));
        if (id == "pi") return detail::make_const(std::numbers::pi, "pi");
        if (id == "e") return detail::make_const(std::numbers::e, "e");
        fail(ParseError::Kind::UnknownIdentifier, start, "unknown identifier '" + id + "'");
    }

    NodePtr call(const std::string& id, std::size_t start) {
        static const std::pair<const char*, Fn> fns[] = {
            {"sin", Fn::Sin}, {"cos", Fn::Cos}, {"exp", Fn::Exp}, {"log", Fn::Log}, {"sqrt", Fn::Sqrt}};
        ++pos_;  // '('
        if (id == "diff") return diff_call(start);
        for (const auto& [fname, fn] : fns) {
            if (id != fname) continue;
            std::vector<NodePtr> args = arguments();
            if (args.size() != 1)
                fail(ParseError::Kind::Arity, start,
                     id + " takes 1 argument, got " + std::to_string(args.size()));
            return detail::func(fn, args[0]);
        }
        fail(ParseError::Kind::UnknownIdentifier, start, "unknown function '" + id + "'");
    }

    std::vector<NodePtr> arguments() {
        std::vector<NodePtr> args;
        if (accept(')')) return args;
        do {
            args.push_back(expr());
        } while (accept(','));
        expect(')');
        return args;
    }

    NodePtr diff_call(std::size_t start) {
        NodePtr body = expr();
        std::vector<int> vars;
        while (accept(',')) {
            skip_ws();
            const std::size_t at = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            const std::string id(src_.substr(at, pos_ - at));
            if (id.empty()) fail(ParseError::Kind::Syntax, at, "expected a coordinate name");
            auto i = chart_.index_of(id);
            if (!i) fail(ParseError::Kind::UnknownIdentifier, at, "diff: '" + id + "' is not a coordinate");
            vars.push_back(static_cast<int>(*i));
        }
        expect(')');
        if (vars.empty()) fail(ParseError::Kind::Arity, start, "diff needs at least one coordinate");
        // Built directly as a marker so that rendered derivatives re-parse
        // to the identical tree.
        for (int v : vars)
            if (!(body->deps & (std::uint64_t{1} << v))) return detail::make_const(0.0);
        if (body->op == detail::Op::Deriv) {
            vars.insert(vars.end(), body->vars.begin(), body->vars.end());
            return detail::make_deriv(body->kids[0], std::move(vars));
        }
        return detail::make_deriv(body, std::move(vars));
    }
};

}  // namespace

ScalarField parse(std::string_view src, const Chart& chart) {
    Parser p(src, chart);
    return ScalarField(chart, p.parse_all());
}

}  // namespace mas::expr
