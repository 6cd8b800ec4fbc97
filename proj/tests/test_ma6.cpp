#include <doctest.h>

#include "mas/ma6.hpp"
#include "oracle.hpp"

#include <random>

using namespace mas::ma6;
using mas::Point;
using mas::sample_points;
using mas::expr::parse;
using mas::ext::DegenerateError;

namespace {

double max_entry(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

double max_form(const DifferentialForm& f, const std::vector<Point>& pts) {
    double m = 0;
    for (const auto& p : pts) m = std::max(m, f.max_abs(p));
    return m;
}

Eigen::MatrixXd blocks(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b, const Eigen::Matrix3d& c,
                       const Eigen::Matrix3d& d) {
    Eigen::MatrixXd m(6, 6);
    m << a, b, c, d;
    return m;
}

const Eigen::Matrix3d I3 = Eigen::Matrix3d::Identity();
const Eigen::Matrix3d Z3 = Eigen::Matrix3d::Zero();

DifferentialForm random_constant_3form(std::mt19937_64& rng, const Chart& c) {
    std::uniform_real_distribution<double> u(-1, 1);
    DifferentialForm f(c, 3);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            for (int k = j + 1; k < 6; ++k) f.add_term({i, j, k}, ScalarField::constant(c, u(rng)));
    return f;
}

// Hitchin tensor from the brute-force oracle. With the alternating convention
// (dx_j ^ b)(e_0, .., e_5) = (-1)^j b(e_0, .., e_j omitted, .., e_5).
Eigen::MatrixXd oracle_hitchin(const DifferentialForm& w, const Point& p) {
    const auto full = oracle::to_full(w, p);
    Eigen::MatrixXd k(6, 6);
    for (int i = 0; i < 6; ++i) {
        std::vector<double> e(6, 0.0);
        e[static_cast<std::size_t>(i)] = 1;
        const auto five = oracle::wedge(oracle::interior(e, full), full);
        for (int j = 0; j < 6; ++j) {
            std::vector<int> rest;
            for (int r = 0; r < 6; ++r)
                if (r != j) rest.push_back(r);
            k(j, i) = (j % 2 ? -1.0 : 1.0) * five.at(rest);
        }
    }
    return k;
}

}  // namespace

TEST_CASE("Hitchin tensors of the Euler pair") {
    const auto pts = sample_points(6, 30);
    const auto p = euler3d_pair("x1^2 - x2*u3");
    const auto kw = hitchin_tensor(p.omega);
    const auto kt = hitchin_tensor(p.theta);
    for (const auto& pt : pts) {
        const double a = p.a.evaluate(pt);
        CHECK(max_entry(kw.evaluate(pt) - 2 * blocks(Z3, -I3, a * I3, Z3)) < 1e-14);
        CHECK(max_entry(kt.evaluate(pt) - 2 * blocks(Z3, Z3, I3, Z3)) < 1e-14);
    }
    const auto sq = euler3d_pair("x1^2");
    const Point at{2, 0, 0, 0, 0, 0};
    const Eigen::MatrixXd k = hitchin_tensor(sq.omega).evaluate(at);
    CHECK(max_entry(k * k + 16 * Eigen::MatrixXd::Identity(6, 6)) < 1e-13);
}

TEST_CASE("Hitchin tensor of the Burgers structure") {
    for (const char* a : {"1", "x1*x2 - 3"}) {
        const auto s = burgers_cy(a);
        for (const auto& pt : sample_points(6, 20)) {
            const double av = parse(a, phase_chart()).evaluate(pt);
            Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(6, 6);
            expected(0, 0) = expected(1, 1) = expected(5, 5) = -1;
            expected(5, 2) = 2 * av;
            const Eigen::MatrixXd k = hitchin_tensor(s.omega()).evaluate(pt);
            CHECK(max_entry(k - expected) < 1e-14);
            CHECK(max_entry(k * k - Eigen::MatrixXd::Identity(6, 6)) < 1e-13);
        }
        CHECK(hitchin_pfaffian(s.omega(), sample_points(6, 20)).evaluate(sample_points(6, 1)[0]) ==
              doctest::Approx(1.0));
    }
}

TEST_CASE("Hitchin tensor agrees with the brute-force oracle") {
    std::mt19937_64 rng(5);
    const Point p(6, 0.0);
    for (int k = 0; k < 6; ++k) {
        const auto w = random_constant_3form(rng, phase_chart());
        CHECK(max_entry(hitchin_tensor(w).evaluate(p) - oracle_hitchin(w, p)) < 1e-12);
    }
}

TEST_CASE("K squared is a multiple of the identity for every 3-form") {
    std::mt19937_64 rng(9);
    const Point p(6, 0.0);
    for (int k = 0; k < 100; ++k) {
        const auto w = random_constant_3form(rng, phase_chart());
        CHECK_NOTHROW(hitchin_pfaffian(w, {p}));
        const Eigen::MatrixXd km = hitchin_tensor(w).evaluate(p);
        const double lambda = hitchin_pfaffian(w).evaluate(p);
        CHECK(max_entry(km * km - lambda * Eigen::MatrixXd::Identity(6, 6)) < 1e-10 * std::max(1.0, std::fabs(lambda)));
    }
}

TEST_CASE("Hitchin pfaffian values") {
    const auto pts = sample_points(6, 20);
    const auto p = euler3d_pair("x1 + 2");
    const auto lw = hitchin_pfaffian(p.omega, pts);
    for (const auto& pt : pts) CHECK(lw.evaluate(pt) == doctest::Approx(-4 * (pt[0] + 2)).epsilon(1e-14));
    const auto lt = hitchin_pfaffian(p.theta, pts);
    CHECK(lt.evaluate(pts[0]) == 0.0);
    CHECK(hitchin_degenerate_points(p.theta, pts).size() == pts.size());
    CHECK(hitchin_degenerate_points(p.omega, pts).empty());
    CHECK_THROWS_AS(hitchin_dual(p.theta, pts), DegenerateError);
}

TEST_CASE("LR metric and operator of the catalog structures") {
    const auto pts = sample_points(6, 20);
    const Point p = pts.front();
    SUBCASE("hess1") {
        const auto s = hess1();
        CHECK(max_entry(lr_metric6(s.omega(), s.big_omega()).evaluate(p) - blocks(Z3, I3, I3, Z3)) == 0.0);
        CHECK(max_entry(compatibility_operator(s.omega()).evaluate(p) - blocks(I3, Z3, Z3, -I3)) == 0.0);
        CHECK(lr_compatibility(s.omega(), s.big_omega(), pts).pass());
    }
    SUBCASE("speciallag") {
        const auto s = speciallag();
        CHECK(max_entry(lr_metric6(s.omega(), s.big_omega()).evaluate(p) - Eigen::MatrixXd::Identity(6, 6)) < 1e-15);
        CHECK(max_entry(compatibility_operator(s.omega()).evaluate(p) - blocks(Z3, -I3, I3, Z3)) < 1e-15);
        CHECK(lr_compatibility(s.omega(), s.big_omega(), pts).pass());
    }
    SUBCASE("burgers") {
        const auto s = burgers_cy("x1^2 - x2");
        const auto g = lr_metric6(s.omega(), s.big_omega());
        for (const auto& pt : pts) {
            Eigen::MatrixXd expected = blocks(Z3, I3, I3, Z3);
            expected(2, 5) = expected(5, 2) = -1;
            expected(2, 2) = 2 * (pt[0] * pt[0] - pt[1]);
            CHECK(max_entry(g.evaluate(pt) - expected) < 1e-14);
            CHECK(signature(g.evaluate(pt)) == Signature{3, 3, 0});
        }
        CHECK(lr_compatibility(s.omega(), s.big_omega(), {Point(6, 0.0)}).pass());
        CHECK(lr_compatibility(s.omega(), s.big_omega(), pts).pass());
    }
}

TEST_CASE("signature follows the sign of the Hitchin pfaffian") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-2, 2);
    int positive = 0, negative = 0;
    const auto h = hess1(), l = speciallag();
    for (int k = 0; k < 60; ++k) {
        const Point p{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        const DifferentialForm w = u(rng) * h.omega() + u(rng) * l.omega();
        const double lambda = hitchin_pfaffian(w).evaluate(p);
        if (std::fabs(lambda) < 1e-3) continue;
        const auto sg = signature(lr_metric6(w, h.big_omega()).evaluate(p));
        if (lambda > 0) {
            CHECK(sg == Signature{3, 3, 0});
            ++positive;
        } else {
            CHECK((sg == Signature{6, 0, 0} || sg == Signature{4, 2, 0} || sg == Signature{0, 6, 0} ||
                   sg == Signature{2, 4, 0}));
            ++negative;
        }
        CHECK(lr_compatibility(w, h.big_omega(), {p}).pass());
    }
    CHECK(positive > 5);
    CHECK(negative > 5);

    for (int k = 0; k < 30; ++k) {
        const double a = u(rng);
        if (std::fabs(a) < 1e-3) continue;
        const auto pr = euler3d_pair(std::to_string(a));
        const auto sg = signature(lr_metric6(pr.omega, pr.big_omega).evaluate(Point(6, 0.0)));
        if (a > 0)  // lambda = -4a < 0
            CHECK(sg == Signature{6, 0, 0});
        else
            CHECK(sg == Signature{3, 3, 0});
    }
}

TEST_CASE("Hitchin dual") {
    const auto pts = sample_points(6, 50);
    const auto& c = phase_chart();
    SUBCASE("burgers") {
        for (const char* a : {"1", "2*x1 - x2 + 0.5", "sin(x1)*x2"}) {
            const auto s = burgers_cy(a);
            const auto hat = hitchin_dual(s.omega(), pts);
            const auto plus = DifferentialForm::from_terms(c, 3, {{"2", {"xi1", "xi2", "x3"}}});
            const auto minus = DifferentialForm::from_terms(c, 3, {{"2", {"x1", "x2", "xi3"}}, {std::string("-2*(") + a + ")", {"x1", "x2", "x3"}}});
            CHECK(max_form(s.omega() + hat - plus, pts) < 1e-14);
            CHECK(max_form(s.omega() - hat - minus, pts) < 1e-14);
            CHECK(max_form(mas::ext::ext_derivative(hat), pts) < 1e-13);
        }
    }
    SUBCASE("hess1") {
        const auto hat = hitchin_dual(hess1().omega());
        const auto expected = DifferentialForm::from_terms(c, 3, {{"1", {"xi1", "xi2", "xi3"}}, {"1", {"x1", "x2", "x3"}}});
        CHECK(max_form(hat - expected, pts) == 0.0);
    }
    SUBCASE("applying the dual twice returns -omega") {
        for (const auto& s : {hess1(), speciallag(), burgers_cy("1 + x1"), burgers_cy("-2")}) {
            const auto twice = hitchin_dual(hitchin_dual(s.omega()));
            CHECK(max_form(twice + s.omega(), pts) < 1e-13);
        }
    }
}

TEST_CASE("Euler pair relations") {
    const auto pts = sample_points(6, 100);
    for (const char* a : {"1", "x1^2", "sin(x1)*cos(x2)"}) {
        CAPTURE(a);
        const auto r = euler_pair_relations(euler3d_pair(a), pts);
        for (const auto& c : r.checks) {
            CAPTURE(c.name);
            if (c.name == "omega ^ theta = 3 vol") {
                // omega ^ theta = -3 vol for the forms as written; theta ^ omega = 3 vol.
                CHECK(c.residual == doctest::Approx(6.0));
            } else {
                CHECK(c.residual < 1e-12);
            }
        }
        CHECK(r.details["omega_wedge_theta_over_vol"] == -3.0);
    }
    const auto pr = euler3d_pair("x2");
    const auto tw = mas::ext::wedge(pr.theta, pr.omega).top_coefficient();
    CHECK(tw.evaluate(pts[0]) == 3.0);
}

TEST_CASE("bilagrangian graphs") {
    const auto pts = sample_points(3, 100);
    const auto& x = space_chart();
    // Burgers-type flow with gamma = 2, psi = x1^2 + x2^2, c = 0.
    const auto u = VectorField::from_strings(x, {"-x1 - 2*x2", "-x2 + 2*x1", "2*x3"});
    const auto ok = verify_bilagrangian(euler3d_pair("1"), u, pts);
    CHECK(ok.pass());
    CHECK(ok.details["fluid_equations_hold"] == true);

    const auto radial = VectorField::from_strings(x, {"x1", "x2", "x3"});
    const auto bad = verify_bilagrangian(euler3d_pair("1"), radial, pts);
    CHECK_FALSE(bad.pass());
    CHECK(bad.checks[1].residual > 1);
    CHECK(bad.details["fluid_equations_hold"] == false);

    const auto rest = VectorField::from_strings(x, {"0", "0", "0"});
    CHECK(verify_bilagrangian(euler3d_pair("0"), rest, pts).pass());
}

TEST_CASE("bilagrangian iff the fluid equations hold") {
    // Linear velocity fields u = M x with random M, a chosen to satisfy or violate the pressure equation.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto pts = sample_points(3, 5);
    const auto& x = space_chart();
    for (int k = 0; k < 60; ++k) {
        Eigen::Matrix3d m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = std::round(u(rng) * 8) / 4;
        if (k % 3 == 0) m(2, 2) = -m(0, 0) - m(1, 1);  // divergence-free
        const double a = (k % 2 == 0) ? -(m * m).trace() / 2 : u(rng);
        std::vector<std::string> comps;
        for (int i = 0; i < 3; ++i) {
            std::string s = "0";
            for (int j = 0; j < 3; ++j) s += " + " + std::to_string(m(i, j)) + "*" + x.name(static_cast<std::size_t>(j));
            comps.push_back(s);
        }
        const auto r = verify_bilagrangian(euler3d_pair(ScalarField::constant(fluid_chart(), a)),
                                           VectorField::from_strings(x, comps), pts);
        CAPTURE(k);
        CHECK(r.pass() == r.details["fluid_equations_hold"].get<bool>());
    }
}

TEST_CASE("integrability of six-dimensional structures") {
    const auto pts = sample_points(6, 50);
    CHECK(integrability6(hess1(), pts).pass());
    CHECK(integrability6(speciallag(), pts).pass());
    CHECK(integrability6(burgers_cy("2*x1 + 3*x2 + 1"), pts).pass());
    const auto r = integrability6(burgers_cy("x1^2"), pts);
    CHECK_FALSE(r.pass());
    CHECK(r.checks[0].pass());
    CHECK(r.checks[1].pass());
    CHECK_FALSE(r.checks[2].pass());
}

TEST_CASE("effectiveness gate") {
    const auto& c = phase_chart();
    const auto big = canonical_symplectic(c);
    // dx1 ^ dxi1 ^ dx2 is not effective.
    CHECK_THROWS_AS(MAStructure6(big, DifferentialForm::from_terms(c, 3, {{"1", {"x1", "xi1", "x2"}}})), StructureError);
    CHECK_THROWS_AS(MAStructure6(big, big), StructureError);
    const auto p = euler3d_pair("x1");
    CHECK_NOTHROW(MAStructure6(p.big_omega, p.omega));
    CHECK_NOTHROW(MAStructure6(p.big_omega, p.theta));
}
