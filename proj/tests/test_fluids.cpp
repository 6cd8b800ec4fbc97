#include <doctest.h>

#include "mas/fluids.hpp"
#include "mas/ma6.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace mas::fluids;
using mas::Point;
using mas::sample_points;
using mas::expr::parse;

namespace {

const Chart& space() { return mas::ma6::space_chart(); }

VectorField field(const Chart& c, const std::vector<std::string>& comps) { return VectorField::from_strings(c, comps); }

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << v << ")";
    return os.str();
}

// Random quadratic q11 x1^2 + q12 x1 x2 + q22 x2^2 + linear part.
std::string random_quadratic(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2, 2);
    return num(u(rng)) + "*x1^2 + " + num(u(rng)) + "*x1*x2 + " + num(u(rng)) + "*x2^2 + " + num(u(rng)) + "*x1 + " +
           num(u(rng)) + "*x2";
}

// Random cubic polynomial in x1, x2.
std::string random_cubic(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::string s = "0";
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j) s += " + " + num(u(rng)) + "*x1^" + std::to_string(i) + "*x2^" + std::to_string(j);
    return s;
}

const mas::Check& check_named(const mas::Report& r, const std::string& prefix) {
    for (const auto& c : r.checks)
        if (c.name.rfind(prefix, 0) == 0) return c;
    throw std::runtime_error("missing check " + prefix);
}

}  // namespace

TEST_CASE("pressure right-hand side") {
    const Point o2{0.3, -0.4}, o3{0.3, -0.4, 0.7};
    CHECK(pressure_rhs(field(plane_chart(), {"-x2", "x1"}), o2) == doctest::Approx(2.0));
    CHECK(pressure_rhs(field(plane_chart(), {"x1", "-x2"}), o2) == doctest::Approx(-2.0));
    CHECK(pressure_rhs(field(space(), {"-x1-2*x2", "-x2+2*x1", "2*x3"}), o3) == doctest::Approx(2.0));
    CHECK_THROWS_AS(velocity_gradient(VectorField::from_strings(mas::ma6::phase_chart(), {"0", "0", "0", "0", "0", "0"}),
                                      Point(6, 0.0)),
                    std::invalid_argument);
}

TEST_CASE("velocity gradient against central differences") {
    const auto u = field(space(), {"sin(x1)*x2^2", "exp(x3)*x1", "x1*x2*x3 + cos(x2)"});
    const double h = 1e-5;
    for (const auto& p : sample_points(3, 20)) {
        const auto m = velocity_gradient(u, p);
        for (std::size_t j = 0; j < 3; ++j) {
            Point a = p, b = p;
            a[j] += h;
            b[j] -= h;
            const auto ua = u.evaluate(a), ub = u.evaluate(b);
            for (std::size_t i = 0; i < 3; ++i) {
                const double fd = (ua(static_cast<long>(i)) - ub(static_cast<long>(i))) / (2 * h);
                CHECK(std::abs(m(static_cast<long>(i), static_cast<long>(j)) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST_CASE("vorticity and strain split") {
    const Point o{0.1, 0.2};
    const auto rot = weiss_split(field(plane_chart(), {"-x2", "x1"}), o);
    CHECK(rot.vorticity(0) == doctest::Approx(2.0));
    CHECK(rot.strain_sq == doctest::Approx(0.0));
    CHECK(rot.rhs == doctest::Approx(2.0));
    const auto strain = weiss_split(field(plane_chart(), {"x1", "-x2"}), o);
    CHECK(strain.vorticity(0) == doctest::Approx(0.0));
    CHECK(strain.strain_sq == doctest::Approx(2.0));
    CHECK(strain.rhs == doctest::Approx(-2.0));
}

TEST_CASE("Weiss identity for divergence-free plane flows") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const auto f = flow2d(parse(random_cubic(rng), plane_chart()));
        for (const auto& p : sample_points(2, 10, 100 + static_cast<std::uint64_t>(t))) {
            const auto w = weiss_split(f.u, p);
            CHECK(std::abs(w.rhs - pressure_rhs(f.u, p)) < 1e-12 * std::max(1.0, std::abs(w.rhs)));
            CHECK(std::abs(velocity_gradient(f.u, p).trace()) < 1e-12);
        }
    }
}

TEST_CASE("pressure rhs equals twice the stream-function Hessian determinant") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 100; ++t) {
        const auto psi = parse(random_cubic(rng), plane_chart());
        const auto f = flow2d(psi);
        for (const auto& p : sample_points(2, 5, 300 + static_cast<std::uint64_t>(t))) {
            const auto zero = mas::expr::ScalarField::constant(plane_chart(), 0.0);
            const double det = ma_residual_2d(psi, zero, p);
            CHECK(std::abs(pressure_rhs(f.u, p) - 2 * det) < 1e-10);
        }
    }
}

TEST_CASE("Monge-Ampere residual in the plane") {
    const Point o{0.4, -0.9};
    CHECK(ma_residual_2d(parse("(x1^2+x2^2)/2", plane_chart()), parse("1", plane_chart()), o) ==
          doctest::Approx(0.0));
    CHECK(ma_residual_2d(parse("x1*x2", plane_chart()), parse("-1", plane_chart()), o) == doctest::Approx(0.0));
    CHECK(ma_residual_2d(parse("x1*x2", plane_chart()), parse("0", plane_chart()), o) == doctest::Approx(-1.0));
}

TEST_CASE("extended stream function") {
    const auto big = extended_stream(parse("0", plane_chart()), 2.0);
    const Point o{0.2, 0.5, -0.3};
    CHECK(big.evaluate(o) == doctest::Approx(-1.5 * 0.09));
    CHECK(big.eval_jet(o, 2).d(2, 2) == doctest::Approx(-3.0));

    // Psi_11 Psi_22 - Psi_12^2 + Psi_33 - lap p / 2 equals the plane residual
    // with right-hand side lap p / 2 + 3 gamma^2 / 4.
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int t = 0; t < 30; ++t) {
        const auto psi = parse(random_cubic(rng), plane_chart());
        const double gamma = u(rng);
        const auto a = parse(num(u(rng)) + " + x1*x2", plane_chart());
        const auto ext = extended_stream(psi, gamma);
        for (const auto& p : sample_points(3, 5, 500 + static_cast<std::uint64_t>(t))) {
            const auto j = ext.eval_jet(p, 2);
            const Point q{p[0], p[1]};
            const double lhs = j.d(0, 0) * j.d(1, 1) - j.d(0, 1) * j.d(0, 1) + j.d(2, 2) - a.evaluate(q);
            CHECK(std::abs(lhs - ma_residual_2d(psi, a + 0.75 * gamma * gamma, q)) < 1e-10);
        }
    }
    const auto e = extended_stream(parse("x1^2+x2^2", plane_chart()), 2.0);
    const auto j = e.eval_jet(o, 2);
    CHECK(j.d(0, 0) * j.d(1, 1) - j.d(0, 1) * j.d(0, 1) + j.d(2, 2) - 1.0 == doctest::Approx(0.0));
}

TEST_CASE("Burgers flows") {
    const auto pts = sample_points(3, 30);
    SUBCASE("displayed example") {
        const auto f = burgers_build(2.0, parse("x1^2+x2^2", plane_chart()), 0.0);
        const auto expect = field(space(), {"-x1-2*x2", "-x2+2*x1", "2*x3"});
        for (const auto& p : pts) CHECK((f.u.evaluate(p) - expect.evaluate(p)).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("pure strain") {
        const auto f = burgers_build(2.0, parse("0", plane_chart()), 1.0);
        const auto expect = field(space(), {"-x1", "-x2", "2*x3-1"});
        for (const auto& p : pts) CHECK((f.u.evaluate(p) - expect.evaluate(p)).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("gamma = 0 embeds the plane flow") {
        const auto psi = parse("sin(x1)*x2", plane_chart());
        const auto f = burgers_build(0.0, psi, 0.5);
        const auto g = flow2d(psi);
        for (const auto& p : pts) {
            const Point q{p[0], p[1]};
            CHECK(f.u[0].evaluate(p) == doctest::Approx(g.u[0].evaluate(q)));
            CHECK(f.u[1].evaluate(p) == doctest::Approx(g.u[1].evaluate(q)));
            CHECK(f.u[2].evaluate(p) == doctest::Approx(-0.5));
        }
    }
    SUBCASE("structural invariants") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-2, 2);
        for (int t = 0; t < 30; ++t) {
            const double gamma = u(rng);
            const auto f = burgers_build(gamma, parse(random_cubic(rng), plane_chart()), u(rng));
            for (const auto& p : sample_points(3, 5, 700 + static_cast<std::uint64_t>(t))) {
                const auto m = velocity_gradient(f.u, p);
                CHECK(std::abs(m.trace()) < 1e-12);
                CHECK(m(0, 2) == 0.0);
                CHECK(m(1, 2) == 0.0);
                CHECK(m(2, 2) == doctest::Approx(gamma));
                Point shifted = p;
                shifted[2] += 0.37;
                CHECK(std::abs(pressure_rhs(f.u, p) - pressure_rhs(f.u, shifted)) < 1e-12);
            }
        }
    }
}

TEST_CASE("stream function to Burgers flow pipeline") {
    const auto pts = sample_points(3, 100);
    SUBCASE("gamma = 2, psi = x1^2 + x2^2, lap p = 2") {
        const auto r = prop5_verify(2.0, parse("x1^2+x2^2", plane_chart()), 0.0, parse("1", plane_chart()), pts);
        CHECK(r.pass());
        CHECK(r.checks.size() == 4);
        CHECK(r.details["failed_stage"].is_null());
    }
    SUBCASE("gamma = 0 reduces to the plane equation") {
        const auto r =
            prop5_verify(0.0, parse("(x1^2+x2^2)/2", plane_chart()), 0.0, parse("1", plane_chart()), pts);
        CHECK(r.pass());
    }
    SUBCASE("lap p = 0 fails stage (i)") {
        const auto r = prop5_verify(2.0, parse("x1^2+x2^2", plane_chart()), 0.0, parse("0", plane_chart()), pts);
        CHECK_FALSE(r.pass());
        CHECK(r.details["failed_stage"] == "(i)");
        // det Hess psi = 4 against lap p / 2 + 3 gamma^2 / 4 = 3.
        CHECK(check_named(r, "(i)").residual == doctest::Approx(1.0));
        CHECK(check_named(r, "(ii)").residual == doctest::Approx(2.0));
    }
    SUBCASE("non-constant pressure") {
        // psi = x1^3/6 + x2^2/2 has det Hess = x1; lap p / 2 = x1 - 3 gamma^2 / 4.
        const auto r = prop5_verify(1.0, parse("x1^3/6 + x2^2/2", plane_chart()), 0.3,
                                    parse("x1 - 0.75", plane_chart()), pts);
        CHECK(r.pass());
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(prop5_verify(1.0, parse("x1", plane_chart()), 0.0, parse("0", plane_chart()), {{0.0, 0.0}}),
                        std::invalid_argument);
        CHECK_THROWS_AS(prop5_verify(1.0, parse("x1", space()), 0.0, parse("0", plane_chart()), pts),
                        std::invalid_argument);
    }
}

TEST_CASE("stages (i) and (ii) agree on random quadratic instances") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-2, 2);
    std::bernoulli_distribution satisfied(0.5);
    const auto pts = sample_points(3, 10);
    int pass_count = 0;
    for (int t = 0; t < 200; ++t) {
        const auto psi = parse(random_quadratic(rng), plane_chart());
        const double gamma = u(rng);
        const auto j = psi.eval_jet(Point{0.0, 0.0}, 2);
        double a = j.d(0, 0) * j.d(1, 1) - j.d(0, 1) * j.d(0, 1) - 0.75 * gamma * gamma;
        if (!satisfied(rng)) a += u(rng);
        const auto r = prop5_verify(gamma, psi, u(rng), parse(num(a), plane_chart()), pts);
        const bool s1 = check_named(r, "(i)").pass(), s2 = check_named(r, "(ii)").pass();
        CHECK(s1 == s2);
        if (s1) {
            CHECK(r.pass());
            ++pass_count;
        }
    }
    CHECK(pass_count > 50);
    CHECK(pass_count < 150);
}

TEST_CASE("grid CSV reading and writing") {
    const auto u = field(plane_chart(), {"-x2", "x1"});
    const auto p = parse("(x1^2+x2^2)/2", plane_chart());
    const auto g = grid_sample(u, {parse_axis("-1:1:6"), parse_axis("0:2:5")}, &p);
    std::stringstream ss;
    grid_write(ss, g);
    const auto back = grid_read(ss);
    CHECK(back.dim == 2);
    CHECK(back.shape == std::vector<std::size_t>{6, 5});
    CHECK(back.spacing[0] == doctest::Approx(0.4));
    CHECK(back.spacing[1] == doctest::Approx(0.5));
    REQUIRE(back.p.has_value());
    for (std::size_t n = 0; n < g.size(); ++n) {
        CHECK(back.u[0][n] == g.u[0][n]);
        CHECK(back.u[1][n] == g.u[1][n]);
        CHECK((*back.p)[n] == (*g.p)[n]);
    }
    // Row-major: the last axis varies fastest.
    CHECK(g.position(1) == Point{-1.0, 0.5});

    const auto fails = [](const std::string& text) {
        std::stringstream in(text);
        CHECK_THROWS_AS(grid_read(in), GridError);
    };
    fails("");
    fails("x,y,u,v\n");
    fails("x1,x2,u1,u2\n");
    std::string ok = "x1,x2,u1,u2\n";
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) ok += std::to_string(i) + "," + std::to_string(j) + ",0,0\n";
    {
        std::stringstream in(ok);
        CHECK(grid_read(in).size() == 16);
    }
    fails(ok + "0,0,0,0\n");                               // row count
    fails(ok.substr(0, ok.rfind("3,3")) + "3,3,0,oops\n");  // bad number
    fails(ok.substr(0, ok.rfind("3,3")) + "3,3,0\n");       // column count
    std::string uneven = ok;
    uneven.replace(uneven.find("\n3,0"), 4, "\n3.5,0");
    fails(uneven);
    std::string swapped = "x1,x2,u1,u2\n";
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) swapped += std::to_string(i) + "," + std::to_string(j) + ",0,0\n";
    fails(swapped);
    CHECK_THROWS_AS(parse_axis("0:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_axis("1:0:5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_axis("0:1:x"), std::invalid_argument);
}

TEST_CASE("grid diagnostics") {
    SUBCASE("solid rotation") {
        const auto p = parse("(x1^2+x2^2)/2", plane_chart());
        const auto g = grid_sample(field(plane_chart(), {"-x2", "x1"}), {parse_axis("-1:1:32"), parse_axis("-1:1:32")}, &p);
        const auto a = grid_analyze(g);
        CHECK(a.nodes.size() == 28 * 28);
        CHECK(a.missing == 32 * 32 - 28 * 28);
        for (const auto& n : a.nodes) {
            CHECK(std::abs(n.rhs - 2.0) < 1e-10);
            CHECK(std::abs(n.weiss_rhs - 2.0) < 1e-10);
            CHECK(std::abs(n.div) < 1e-10);
            CHECK(std::abs(*n.lap_p - 2.0) < 1e-9);
            CHECK(n.cls == NodeClass::Elliptic);
        }
        CHECK(a.report.pass());
        const auto j = a.to_json(false);
        CHECK(j["counts"]["elliptic"] == 28 * 28);
        CHECK_FALSE(j.contains("nodes"));
        CHECK(a.to_json(true)["nodes"].size() == 28 * 28);
    }
    SUBCASE("Taylor-Green at 64^2") {
        const auto psi = parse("sin(x1)*sin(x2)", plane_chart());
        const auto f = flow2d(psi);
        const Axis ax{0.0, 2 * M_PI, 64};
        const auto a = grid_analyze(grid_sample(f.u, {ax, ax}));
        const auto exact = parse("2*(sin(x1)^2*sin(x2)^2 - cos(x1)^2*cos(x2)^2)", plane_chart());
        double err = 0, ref = 0;
        for (const auto& n : a.nodes) {
            err = std::max(err, std::abs(n.weiss_rhs - exact.evaluate(n.x)));
            ref = std::max(ref, std::abs(exact.evaluate(n.x)));
        }
        CHECK(err / ref < 1e-4);
        CHECK(err / ref > 1e-9);  // genuinely finite-difference, not exact
        const auto j = a.to_json(false);
        CHECK(j["counts"]["elliptic"].get<int>() > 0);
        CHECK(j["counts"]["hyperbolic"].get<int>() > 0);
    }
    SUBCASE("stencil order") {
        // Halving h shrinks the error by about 2^4.
        const auto f = flow2d(parse("sin(x1)*sin(x2)", plane_chart()));
        const auto exact = parse("2*(sin(x1)^2*sin(x2)^2 - cos(x1)^2*cos(x2)^2)", plane_chart());
        const auto error_at = [&](std::size_t n) {
            const Axis ax{0.0, 2 * M_PI, n};
            double err = 0;
            for (const auto& node : grid_analyze(grid_sample(f.u, {ax, ax})).nodes)
                err = std::max(err, std::abs(node.rhs - exact.evaluate(node.x)));
            return err;
        };
        const double ratio = error_at(33) / error_at(65);
        CHECK(ratio > 12);
        CHECK(ratio < 20);
    }
    SUBCASE("3D Burgers flow") {
        const auto f = burgers_build(2.0, parse("x1^2+x2^2", plane_chart()), 0.0);
        const Axis ax{-1, 1, 9};
        const auto a = grid_analyze(grid_sample(f.u, {ax, ax, ax}));
        CHECK(a.nodes.size() == 125);
        for (const auto& n : a.nodes) CHECK(std::abs(n.rhs - 2.0) < 1e-10);
        const auto j = a.to_json(false);
        CHECK_FALSE(j["summary"].contains("weiss_rhs"));
        CHECK(j["summary"]["rhs"]["mean"].get<double>() == doctest::Approx(2.0));
    }
    SUBCASE("compressible data fails the divergence check") {
        const auto g = grid_sample(field(plane_chart(), {"x1", "x2"}), {parse_axis("-1:1:8"), parse_axis("-1:1:8")});
        const auto a = grid_analyze(g);
        CHECK_FALSE(a.report.pass());
        CHECK(a.report.checks.front().residual == doctest::Approx(2.0));
    }
}
