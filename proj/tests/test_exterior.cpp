#include <doctest.h>

#include "mas/exterior.hpp"
#include "mas/form_json.hpp"
#include "mas/sampling.hpp"
#include "generators.hpp"
#include "oracle.hpp"

#include <random>

using namespace mas::ext;
using mas::expr::parse;
using gen::RandomForms;

namespace {

const Chart euler({"x1", "x2", "u1", "u2"});
const Chart phase6({"x1", "x2", "x3", "xi1", "xi2", "xi3"});
const Chart fluid6({"x1", "x2", "x3", "u1", "u2", "u3"});
const Chart plane({"x1", "x2"});

DifferentialForm f2(const Chart& c, std::vector<std::pair<std::string, std::vector<std::string>>> t, int deg = 2) {
    return DifferentialForm::from_terms(c, deg, t);
}

double max_over(const DifferentialForm& f, int n = 100, std::uint64_t seed = 42) {
    double m = 0;
    for (const auto& p : mas::sample_points(f.chart().dim(), n, seed)) m = std::max(m, f.max_abs(p));
    return m;
}



}  // namespace

TEST_CASE("basis forms reorder with sign") {
    auto f = DifferentialForm::basis(euler, {3, 0});
    REQUIRE(f.terms().size() == 1);
    CHECK(f.terms().begin()->first == MultiIndex{0, 3});
    CHECK(f.terms().begin()->second.constant_value() == -1.0);
    CHECK(DifferentialForm::basis(euler, {1, 1}).is_structurally_zero());
}

TEST_CASE("Euler omega squares to a times Omega squared") {
    auto omega = f2(euler, {{"1", {"u1", "u2"}}, {"-(x1^2 + 1)", {"x1", "x2"}}});
    auto big = f2(euler, {{"1", {"x1", "u1"}}, {"1", {"x2", "u2"}}});
    auto ww = wedge(omega, omega);
    auto oo = wedge(big, big);
    for (const auto& p : mas::sample_points(4, 20)) {
        const double a = p[0] * p[0] + 1;
        CHECK(ww.top_coefficient().evaluate(p) == doctest::Approx(a * oo.top_coefficient().evaluate(p)));
    }
}

TEST_CASE("one-forms wedge to zero") {
    RandomForms gen(1);
    for (int t = 0; t < 20; ++t) {
        auto a = gen.form(euler, 1);
        CHECK(max_over(wedge(a, a), 10) < 1e-14);
    }
}

TEST_CASE("theta wedge omega is three volumes") {
    auto omega = f2(fluid6,
                    {{"x1*x2 + 2", {"x1", "x2", "x3"}},
                     {"-1", {"u1", "u2", "x3"}},
                     {"-1", {"u1", "x2", "u3"}},
                     {"-1", {"x1", "u2", "u3"}}},
                    3);
    auto theta = f2(fluid6, {{"1", {"u1", "x2", "x3"}}, {"1", {"x1", "u2", "x3"}}, {"1", {"x1", "x2", "u3"}}}, 3);
    // Degree-3 forms anticommute: the product is +3 vol in the order
    // theta ^ omega and -3 vol in the order omega ^ theta.
    CHECK(wedge(theta, omega).top_coefficient().constant_value() == 3.0);
    CHECK(wedge(omega, theta).top_coefficient().constant_value() == -3.0);
}

TEST_CASE("exterior derivative") {
    auto omega = f2(euler, {{"1", {"u1", "u2"}}, {"-(x1^2 + sin(x2))", {"x1", "x2"}}});
    CHECK(ext_derivative(omega).is_structurally_zero());

    auto f = DifferentialForm::function(parse("x1^2*u2", euler));
    auto df = ext_derivative(f);
    const std::vector<double> p{2, 0, 0, 3};
    CHECK(df.coeff({0}).evaluate(p) == 12.0);
    CHECK(df.coeff({3}).evaluate(p) == 4.0);

    // d(omega / sqrt|a|) with a = x1^2 + 1 does not vanish at (1, 0).
    auto a = parse("x1^2 + 1", euler);
    auto w = f2(euler, {{"1", {"u1", "u2"}}, {"-(x1^2 + 1)", {"x1", "x2"}}});
    auto dn = ext_derivative((1.0 / mas::expr::sqrt_abs(a)) * w);
    const std::vector<double> q{1, 0, 0, 0};
    // d(a^{-1/2}) ^ du1 ^ du2 = -x1 a^{-3/2} dx1 ^ du1 ^ du2
    CHECK(dn.coeff({0, 2, 3}).evaluate(q) == doctest::Approx(-std::pow(2.0, -1.5)).epsilon(1e-14));
    CHECK(dn.max_abs(q) > 0.3);
}

TEST_CASE("d squared vanishes") {
    RandomForms gen(2);
    for (int deg = 0; deg <= 3; ++deg)
        for (int t = 0; t < 5; ++t) {
            auto a = gen.form(phase6, deg);
            CHECK(max_over(ext_derivative(ext_derivative(a)), 100) < 1e-12);
        }
}

TEST_CASE("interior products from the reduction examples") {
    auto lap = f2(phase6,
                  {{"1", {"xi1", "x2", "x3"}}, {"1", {"x1", "xi2", "x3"}}, {"1", {"x1", "x2", "xi3"}}}, 3);
    auto r = interior_product(VectorField::coordinate(phase6, 2), lap);
    auto expect = f2(phase6, {{"1", {"xi1", "x2"}}, {"1", {"x1", "xi2"}}});
    CHECK(max_over(r - expect, 5) == 0.0);

    auto theta = f2(fluid6, {{"1", {"u1", "x2", "x3"}}, {"1", {"x1", "u2", "x3"}}, {"1", {"x1", "x2", "u3"}}}, 3);
    auto gamma = 0.75;
    auto x = VectorField::from_strings(fluid6, {"0", "0", "1", "0", "0", "0.75"});
    auto tc = interior_product(x, theta);
    auto tc_expect = f2(fluid6, {{"1", {"u1", "x2"}}, {"1", {"x1", "u2"}}, {std::to_string(gamma), {"x1", "x2"}}});
    CHECK(max_over(tc - tc_expect, 5) < 1e-15);
}

TEST_CASE("interior product twice vanishes") {
    RandomForms gen(3);
    for (int deg = 2; deg <= 4; ++deg) {
        auto a = gen.form(phase6, deg);
        auto x = gen.vector(phase6);
        CHECK(max_over(interior_product(x, interior_product(x, a)), 50) < 1e-12);
    }
}

TEST_CASE("Lie derivative") {
    auto f = DifferentialForm::function(parse("x1^2", plane));
    auto l = lie_derivative(VectorField::coordinate(plane, 0), f);
    CHECK(l.coeff({}).evaluate(std::vector<double>{1.5, 0}) == 3.0);

    auto omega = f2(fluid6,
                    {{"x1^2 - x2", {"x1", "x2", "x3"}},
                     {"-1", {"u1", "u2", "x3"}},
                     {"-1", {"u1", "x2", "u3"}},
                     {"-1", {"x1", "u2", "u3"}}},
                    3);
    auto x = VectorField::from_strings(fluid6, {"0", "0", "1", "0", "0", "1.5"});
    CHECK(max_over(lie_derivative(x, omega), 50) < 1e-12);
}

TEST_CASE("Lie derivative commutes with d") {
    RandomForms gen(4);
    for (int deg = 0; deg <= 2; ++deg) {
        auto a = gen.form(euler, deg);
        auto x = gen.vector(euler);
        auto lhs = lie_derivative(x, ext_derivative(a));
        auto rhs = ext_derivative(lie_derivative(x, a));
        CHECK(max_over(lhs - rhs, 100) < 1e-10);
    }
}

TEST_CASE("graded commutativity") {
    RandomForms gen(5);
    for (int k = 0; k <= 3; ++k)
        for (int l = 0; l + k <= 6 && l <= 3; ++l) {
            auto a = gen.form(phase6, k);
            auto b = gen.form(phase6, l);
            auto ab = wedge(a, b);
            auto ba = wedge(b, a);
            const double s = (k * l) % 2 ? -1.0 : 1.0;
            CHECK(max_over(ab - s * ba, 100) < 1e-12);
        }
}

TEST_CASE("brute-force oracle agrees on wedge and interior products") {
    RandomForms gen(6);
    const auto pts = mas::sample_points(6, 3, 11);
    for (int k = 0; k <= 3; ++k)
        for (int l = 0; l <= 3; ++l) {
            auto a = gen.form(phase6, k);
            auto b = gen.form(phase6, l);
            auto ab = wedge(a, b);
            for (const auto& p : pts) {
                auto full = oracle::wedge(oracle::to_full(a, p), oracle::to_full(b, p));
                CHECK(oracle::mismatch(ab, p, full) < 1e-12);
            }
        }
    for (int k = 1; k <= 3; ++k) {
        auto a = gen.form(phase6, k);
        auto x = gen.vector(phase6);
        auto ia = interior_product(x, a);
        for (const auto& p : pts) {
            const auto xv = x.evaluate(p);
            auto full = oracle::interior(std::vector<double>(xv.data(), xv.data() + xv.size()), oracle::to_full(a, p));
            CHECK(oracle::mismatch(ia, p, full) < 1e-12);
        }
    }
}

TEST_CASE("pullback along the stream-function graph") {
    const std::string psi = "x1^3*x2 - 2*x2^2 + sin(x1)";
    auto graph = GraphMap::from_strings(plane, euler,
                                        {"x1", "x2", "-diff(" + psi + ", x2)", "diff(" + psi + ", x1)"});
    auto big = f2(euler, {{"1", {"x1", "u2"}}, {"1", {"u1", "x2"}}});
    CHECK(max_over(pullback(graph, big), 50) < 1e-12);

    auto omega = f2(euler, {{"1", {"u1", "u2"}}, {"-(x1*x2 + 3)", {"x1", "x2"}}});
    auto pb = pullback(graph, omega);
    auto p = parse(psi, plane);
    for (const auto& pt : mas::sample_points(2, 50)) {
        auto j = p.eval_jet(pt, 2);
        const double expect = j.d(0, 0) * j.d(1, 1) - j.d(0, 1) * j.d(0, 1) - (pt[0] * pt[1] + 3);
        CHECK(pb.coeff({0, 1}).evaluate(pt) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("pullback of the hess example along a unit-Hessian graph") {
    const Chart x3({"x1", "x2", "x3"});
    auto graph = GraphMap::from_strings(x3, phase6, {"x1", "x2", "x3", "x1", "x2", "x3"});
    auto hess = f2(phase6, {{"1", {"xi1", "xi2", "xi3"}}, {"-1", {"x1", "x2", "x3"}}}, 3);
    auto pb = pullback(graph, hess);
    CHECK(max_over(pb, 10) == 0.0);
}

TEST_CASE("pullback is functorial") {
    RandomForms gen(7);
    const Chart src({"s", "t", "r"});
    std::vector<std::string> comps;
    for (int i = 0; i < 4; ++i) comps.push_back(gen.poly(src));
    auto f = GraphMap::from_strings(src, euler, comps);
    for (int k = 0; k <= 2; ++k) {
        auto a = gen.form(euler, k);
        auto b = gen.form(euler, 1);
        CHECK(max_over(pullback(f, ext_derivative(a)) - ext_derivative(pullback(f, a)), 100) < 1e-10);
        if (k + 1 <= 3)
            CHECK(max_over(pullback(f, wedge(a, b)) - wedge(pullback(f, a), pullback(f, b)), 100) < 1e-10);
    }
}

TEST_CASE("operator from a pair of 2-forms") {
    auto big = f2(euler, {{"1", {"x1", "u2"}}, {"1", {"u1", "x2"}}});
    auto omega = f2(euler, {{"1", {"u1", "u2"}}, {"-(x1^2 - x2)", {"x1", "x2"}}});
    auto a = operator_from_pair(big, omega);
    for (const auto& p : mas::sample_points(4, 30)) {
        const double av = p[0] * p[0] - p[1];
        const Eigen::MatrixXd m = a.evaluate(p);
        CHECK((m * m + av * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
    }
    auto id = operator_from_pair(big, big);
    CHECK((id.evaluate(std::vector<double>{0.1, 0.2, 0.3, 0.4}) - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);

    // T from the dual form with a = -4: pf(hat) = -a = 4, so T^2 = -Id = sign(a) Id.
    auto hat = f2(euler, {{"-1", {"u1", "u2"}}, {"4", {"x1", "x2"}}});
    auto t = operator_from_pair(big, 0.5 * hat);
    const Eigen::MatrixXd tm = t.evaluate(std::vector<double>{1, 1, 0, 0});
    CHECK((tm * tm + Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("operator round trip with a non-constant symplectic form") {
    RandomForms gen(8);
    auto big = f2(euler, {{"2 + x1^2", {"x1", "u2"}}, {"1", {"u1", "x2"}}, {"x2", {"x1", "x2"}}});
    auto omega = gen.form(euler, 2);
    auto a = operator_from_pair(big, omega);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    for (const auto& p : mas::sample_points(4, 50)) {
        const Eigen::MatrixXd am = a.evaluate(p);
        Eigen::VectorXd x(4), y(4);
        for (int i = 0; i < 4; ++i) {
            x(i) = n(rng);
            y(i) = n(rng);
        }
        const Eigen::VectorXd ax = am * x;
        CHECK(std::fabs(big.apply(p, {ax, y}) - omega.apply(p, {x, y})) < 1e-12);
    }
}

TEST_CASE("degenerate constant form is rejected") {
    auto bad = f2(euler, {{"1", {"x1", "x2"}}});
    CHECK_THROWS_AS(operator_from_pair(bad, bad), DegenerateError);
}

TEST_CASE("symmetric pullback to a Lagrangian graph") {
    const std::vector<std::vector<std::string>> gs = {
        {"0", "0", "0", "1"}, {"0", "0", "-1", "0"}, {"0", "-1", "0", "0"}, {"1", "0", "0", "0"}};
    std::vector<std::vector<ScalarField>> ge(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) ge[i].push_back(parse(gs[i][j], euler));
    SymmetricTensorField g(euler, ge);

    const std::string psi = "x1^2*x2 + cos(x2)";
    auto graph = GraphMap::from_strings(plane, euler,
                                        {"x1", "x2", "-diff(" + psi + ", x2)", "diff(" + psi + ", x1)"});
    auto h = pullback_symmetric(graph, g);
    auto p = parse(psi, plane);
    for (const auto& pt : mas::sample_points(2, 20)) {
        auto j = p.eval_jet(pt, 2);
        const Eigen::MatrixXd hm = h.evaluate(pt);
        CHECK(hm(0, 0) == doctest::Approx(2 * j.d(0, 0)));
        CHECK(hm(0, 1) == doctest::Approx(2 * j.d(0, 1)));
        CHECK(hm(1, 1) == doctest::Approx(2 * j.d(1, 1)));
    }

    auto ident = GraphMap::from_strings(euler, euler, {"x1", "x2", "u1", "u2"});
    auto same = pullback_symmetric(ident, g);
    CHECK((same.evaluate(std::vector<double>{0.3, 0.1, 0.2, 0.5}) - g.evaluate(std::vector<double>{0.3, 0.1, 0.2, 0.5}))
              .norm() == 0.0);

    auto quad = GraphMap::from_strings(plane, euler, {"x1", "x2", "-x2", "x1"});
    const Eigen::MatrixXd hq = pullback_symmetric(quad, g).evaluate(std::vector<double>{0.4, -0.2});
    CHECK((hq - 2 * Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
    CHECK(hq.determinant() == doctest::Approx(4.0));
}

TEST_CASE("JSON round trip") {
    auto omega = f2(euler, {{"1", {"u1", "u2"}}, {"-(x1^2 - x2)", {"x1", "x2"}}});
    auto j = to_json(omega);
    CHECK(j["degree"] == 2);
    auto back = form_from_json(j);
    CHECK(max_over(back - omega, 10) == 0.0);
    CHECK_THROWS_AS(form_from_json(nlohmann::json{{"degree", 2}}), std::invalid_argument);
    CHECK_THROWS_AS(form_from_json(nlohmann::json::parse(
                        R"({"degree":1,"chart":["x"],"terms":[{"index":["y"],"coeff":"1"}]})")),
                    std::invalid_argument);
}

TEST_CASE("chart and degree errors") {
    auto a = DifferentialForm::basis(euler, {0, 1});
    auto b = DifferentialForm::basis(plane, {0});
    CHECK_THROWS_AS(wedge(a, b), std::invalid_argument);
    CHECK_THROWS_AS(wedge(wedge(a, a), DifferentialForm::basis(euler, {2})), std::invalid_argument);
    CHECK_THROWS_AS(ext_derivative(DifferentialForm::basis(plane, {0, 1})), std::invalid_argument);
}
