#include "mas/ma6.hpp"

#include "mas/curvature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>

namespace mas::ma6 {

using ext::DegenerateError;

namespace {

std::string format_point(const Point& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ")";
    return os.str();
}

double max_entry(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void require_dim6(const Chart& c) {
    if (c.dim() != 6) throw std::invalid_argument("six-dimensional chart required");
}

ScalarField zero(const Chart& c) { return ScalarField::constant(c, 0.0); }

DifferentialForm terms3(const Chart& c, std::vector<std::pair<ScalarField, ext::MultiIndex>> t) {
    DifferentialForm f(c, 3);
    for (auto& [coef, idx] : t) f.add_term(idx, coef);
    return f;
}

}  // namespace

const Chart& phase_chart() {
    static const Chart c({"x1", "x2", "x3", "xi1", "xi2", "xi3"});
    return c;
}

const Chart& fluid_chart() {
    static const Chart c({"x1", "x2", "x3", "u1", "u2", "u3"});
    return c;
}

const Chart& space_chart() {
    static const Chart c({"x1", "x2", "x3"});
    return c;
}

DifferentialForm canonical_symplectic(const Chart& c) {
    require_dim6(c);
    DifferentialForm f(c, 2);
    for (int i = 0; i < 3; ++i) f.add_term({i, i + 3}, ScalarField::constant(c, 1.0));
    return f;
}

MAStructure6::MAStructure6(DifferentialForm big_omega, DifferentialForm omega, const std::vector<Point>& samples)
    : big_omega_(std::move(big_omega)), omega_(std::move(omega)) {
    require_dim6(omega_.chart());
    if (!(big_omega_.chart() == omega_.chart())) throw StructureError("Omega and omega live on different charts");
    if (big_omega_.degree() != 2 || omega_.degree() != 3) throw StructureError("need a 2-form Omega and a 3-form omega");
    const auto eff = ext::wedge(omega_, big_omega_);
    for (const auto& p : samples)
        if (eff.max_abs(p) >= 1e-12) throw StructureError("omega is not effective at " + format_point(p));
}

MAStructure6::MAStructure6(DifferentialForm big_omega, DifferentialForm omega)
    : MAStructure6(std::move(big_omega), std::move(omega), sample_points(6, kDefaultSamples)) {}

OperatorField hitchin_tensor(const DifferentialForm& omega) {
    const Chart& c = omega.chart();
    require_dim6(c);
    if (omega.degree() != 3) throw std::invalid_argument("hitchin_tensor: need a 3-form");
    std::vector<std::vector<ScalarField>> k(6, std::vector<ScalarField>(6, zero(c)));
    for (std::size_t i = 0; i < 6; ++i) {
        const auto w = ext::wedge(ext::interior_product(VectorField::coordinate(c, i), omega), omega);
        for (std::size_t j = 0; j < 6; ++j)
            k[j][i] = ext::wedge(DifferentialForm::basis(c, {static_cast<int>(j)}), w).top_coefficient();
    }
    return {c, k};
}

ScalarField hitchin_pfaffian(const DifferentialForm& omega) {
    const auto k = hitchin_tensor(omega);
    const auto k2 = k * k;
    ScalarField tr = zero(omega.chart());
    for (std::size_t i = 0; i < 6; ++i)
        if (!k2(i, i).is_zero()) tr = tr + k2(i, i);
    return tr / 6.0;
}

ScalarField hitchin_pfaffian(const DifferentialForm& omega, const std::vector<Point>& samples) {
    const auto k = hitchin_tensor(omega);
    const ScalarField lambda = hitchin_pfaffian(omega);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
    for (const auto& p : samples) {
        const Eigen::MatrixXd km = k.evaluate(p);
        const Eigen::MatrixXd k2 = km * km;
        const double res = max_entry(k2 - lambda.evaluate(p) * id);
        if (res > 1e-10 * std::max(1.0, max_entry(k2)))
            throw NondegeneracyViolation("K^2 is not a multiple of the identity at " + format_point(p));
    }
    return lambda;
}

std::vector<Point> hitchin_degenerate_points(const DifferentialForm& omega, const std::vector<Point>& samples) {
    const ScalarField lambda = hitchin_pfaffian(omega);
    std::vector<Point> out;
    for (const auto& p : samples)
        if (std::fabs(lambda.evaluate(p)) <= 1e-10) out.push_back(p);
    return out;
}

SymmetricTensorField lr_metric6(const DifferentialForm& omega, const DifferentialForm& big_omega) {
    const Chart& c = omega.chart();
    require_dim6(c);
    const ScalarField root = expr::sqrt_abs(hitchin_pfaffian(omega));
    std::vector<DifferentialForm> iw;
    for (std::size_t i = 0; i < 6; ++i) iw.push_back(ext::interior_product(VectorField::coordinate(c, i), omega));
    std::vector<std::vector<ScalarField>> g(6, std::vector<ScalarField>(6, zero(c)));
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i; j < 6; ++j) {
            const ScalarField top = ext::wedge(ext::wedge(iw[i], iw[j]), big_omega).top_coefficient();
            g[i][j] = top.is_zero() ? top : -top / root;
        }
    return {c, g};
}

OperatorField compatibility_operator(const DifferentialForm& omega) {
    const ScalarField lambda = hitchin_pfaffian(omega);
    const auto k = hitchin_tensor(omega);
    if (auto v = lambda.constant_value()) {
        if (*v == 0.0) throw DegenerateError("Hitchin pfaffian vanishes identically");
        return ScalarField::constant(omega.chart(), (*v > 0 ? -1.0 : 1.0) / std::sqrt(std::fabs(*v))) * k;
    }
    // -sign(lambda) / sqrt|lambda| = -lambda / |lambda|^(3/2).
    const ScalarField abs_l = expr::sqrt_abs(lambda);
    return (-lambda / (abs_l * abs_l * abs_l)) * k;
}

Report lr_compatibility(const DifferentialForm& omega, const DifferentialForm& big_omega,
                        const std::vector<Point>& samples) {
    Report r;
    r.subject = "LR compatibility";
    auto& c = r.add("g(A X, Y) = Omega(X, Y)", 1e-10);
    const auto degenerate = hitchin_degenerate_points(omega, samples);
    if (!degenerate.empty()) {
        c.residual = INFINITY;
        c.argmax = degenerate.front();
        c.note = "Hitchin pfaffian vanishes";
        return r;
    }
    const auto g = lr_metric6(omega, big_omega);
    const auto a = compatibility_operator(omega);
    std::mt19937_64 rng(kDefaultSeed);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const auto& p : samples) {
        const Eigen::MatrixXd gm = g.evaluate(p);
        const Eigen::MatrixXd am = a.evaluate(p);
        const Eigen::MatrixXd wm = big_omega.matrix(p);
        for (int k = 0; k < 4; ++k) {
            Eigen::VectorXd x(6), y(6);
            for (int i = 0; i < 6; ++i) {
                x(i) = u(rng);
                y(i) = u(rng);
            }
            c.observe((am * x).dot(gm * y) - x.dot(wm * y), p);
        }
        // Entrywise as well, so the check does not rely on the random vectors.
        c.observe(max_entry(am.transpose() * gm - wm), p);
    }
    return r;
}

DifferentialForm derivation(const OperatorField& k, const DifferentialForm& omega) {
    const Chart& c = omega.chart();
    DifferentialForm out(c, omega.degree());
    const int n = static_cast<int>(c.dim());
    for (const auto& [idx, coef] : omega.terms())
        for (std::size_t s = 0; s < idx.size(); ++s)
            for (int i = 0; i < n; ++i) {
                const ScalarField& kij = k(static_cast<std::size_t>(idx[s]), static_cast<std::size_t>(i));
                if (kij.is_zero()) continue;
                ext::MultiIndex moved = idx;
                moved[s] = i;
                out.add_term(moved, coef * kij);
            }
    return out;
}

DifferentialForm hitchin_dual(const DifferentialForm& omega) {
    const ScalarField lambda = hitchin_pfaffian(omega);
    if (auto v = lambda.constant_value(); v && *v == 0.0) throw DegenerateError("Hitchin pfaffian vanishes identically");
    return (1.0 / (3.0 * expr::sqrt_abs(lambda))) * derivation(hitchin_tensor(omega), omega);
}

DifferentialForm hitchin_dual(const DifferentialForm& omega, const std::vector<Point>& samples) {
    const auto bad = hitchin_degenerate_points(omega, samples);
    if (!bad.empty()) throw DegenerateError("Hitchin pfaffian vanishes at " + format_point(bad.front()));
    return hitchin_dual(omega);
}

Signature signature(const Eigen::MatrixXd& symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    Signature s;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > tol)
            ++s.positive;
        else if (ev(i) < -tol)
            ++s.negative;
        else
            ++s.zero;
    }
    return s;
}

MAStructure6 hess1() {
    const Chart& c = phase_chart();
    const auto one = ScalarField::constant(c, 1.0);
    return {canonical_symplectic(c), terms3(c, {{one, {3, 4, 5}}, {-one, {0, 1, 2}}})};
}

MAStructure6 speciallag() {
    // Im((dx1 + i dxi1)^(dx2 + i dxi2)^(dx3 + i dxi3)).
    const Chart& c = phase_chart();
    const auto one = ScalarField::constant(c, 1.0);
    return {canonical_symplectic(c),
            terms3(c, {{one, {3, 1, 2}}, {one, {0, 4, 2}}, {one, {0, 1, 5}}, {-one, {3, 4, 5}}})};
}

MAStructure6 burgers_cy(const ScalarField& a) {
    const Chart& c = phase_chart();
    if (!(a.chart() == c)) throw std::invalid_argument("burgers_cy: a must be written over the phase chart");
    const auto one = ScalarField::constant(c, 1.0);
    return {canonical_symplectic(c), terms3(c, {{one, {3, 4, 2}}, {-a, {0, 1, 2}}, {one, {0, 1, 5}}})};
}

MAStructure6 burgers_cy(const std::string& a) { return burgers_cy(expr::parse(a, phase_chart())); }

EulerPair6 euler3d_pair(const ScalarField& a) {
    const Chart& c = fluid_chart();
    if (!(a.chart() == c)) throw std::invalid_argument("euler3d_pair: a must be written over the fluid chart");
    const auto one = ScalarField::constant(c, 1.0);
    EulerPair6 p;
    p.omega = terms3(c, {{a, {0, 1, 2}}, {-one, {3, 4, 2}}, {-one, {3, 1, 5}}, {-one, {0, 4, 5}}});
    p.theta = terms3(c, {{one, {3, 1, 2}}, {one, {0, 4, 2}}, {one, {0, 1, 5}}});
    p.big_omega = canonical_symplectic(c);
    p.a = a;
    return p;
}

EulerPair6 euler3d_pair(const std::string& a) { return euler3d_pair(expr::parse(a, fluid_chart())); }

SymmetricTensorField pair_metric(const DifferentialForm& big_omega, const OperatorField& k) {
    const auto w = ext::form_matrix(big_omega);
    const Chart& c = big_omega.chart();
    const std::size_t n = c.dim();
    std::vector<std::vector<ScalarField>> g(n, std::vector<ScalarField>(n, zero(c)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l)
                if (!w[i][l].is_zero() && !k(l, j).is_zero()) g[i][j] = g[i][j] + w[i][l] * k(l, j);
    return {c, g};
}

Report euler_pair_relations(const EulerPair6& p, const std::vector<Point>& samples) {
    Report r;
    r.subject = "Euler pair relations";
    const auto kw = hitchin_tensor(p.omega);
    const auto kt = hitchin_tensor(p.theta);
    const auto gw = pair_metric(p.big_omega, kw);
    const auto gt = pair_metric(p.big_omega, kt);
    const auto wt = ext::wedge(p.omega, p.theta).top_coefficient();
    auto& c_kw = r.add("K_omega^2 = -4a Id", 1e-12);
    auto& c_kt = r.add("K_theta^2 = 0", 1e-12);
    auto& c_anti = r.add("K_omega K_theta + K_theta K_omega = -4 Id", 1e-12);
    auto& c_comm = r.add("[K_omega, K_theta] = 4 diag(-Id, Id)", 1e-12);
    auto& c_kwm = r.add("K_omega = 2 [[0, -Id], [a Id, 0]]", 1e-12);
    auto& c_ktm = r.add("K_theta = 2 [[0, 0], [Id, 0]]", 1e-12);
    auto& c_gw = r.add("g_omega = diag(2a Id, 2 Id)", 1e-12);
    auto& c_gt = r.add("g_theta = diag(2 Id, 0)", 1e-12);
    auto& c_vol = r.add("omega ^ theta = 3 vol", 1e-12);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
    const Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
    Eigen::MatrixXd diag = id;
    diag.topLeftCorner(3, 3) = -id3;
    for (const auto& pt : samples) {
        const double a = p.a.evaluate(pt);
        const Eigen::MatrixXd w = kw.evaluate(pt);
        const Eigen::MatrixXd t = kt.evaluate(pt);
        c_kw.observe(max_entry(w * w + 4 * a * id), pt);
        c_kt.observe(max_entry(t * t), pt);
        c_anti.observe(max_entry(w * t + t * w + 4 * id), pt);
        c_comm.observe(max_entry(w * t - t * w - 4 * diag), pt);
        Eigen::MatrixXd ew = Eigen::MatrixXd::Zero(6, 6), et = Eigen::MatrixXd::Zero(6, 6);
        ew.topRightCorner(3, 3) = -2 * id3;
        ew.bottomLeftCorner(3, 3) = 2 * a * id3;
        et.bottomLeftCorner(3, 3) = 2 * id3;
        c_kwm.observe(max_entry(w - ew), pt);
        c_ktm.observe(max_entry(t - et), pt);
        Eigen::MatrixXd egw = Eigen::MatrixXd::Zero(6, 6), egt = Eigen::MatrixXd::Zero(6, 6);
        egw.topLeftCorner(3, 3) = 2 * a * id3;
        egw.bottomRightCorner(3, 3) = 2 * id3;
        egt.topLeftCorner(3, 3) = 2 * id3;
        c_gw.observe(max_entry(gw.evaluate(pt) - egw), pt);
        c_gt.observe(max_entry(gt.evaluate(pt) - egt), pt);
        c_vol.observe(wt.evaluate(pt) - 3.0, pt);
    }
    // Both are 3-forms, so theta ^ omega = -omega ^ theta.
    if (!samples.empty()) r.details["omega_wedge_theta_over_vol"] = wt.evaluate(samples.front());
    return r;
}

Report verify_bilagrangian(const EulerPair6& p, const VectorField& u, const std::vector<Point>& samples) {
    const Chart& x = space_chart();
    if (!(u.chart() == x)) throw std::invalid_argument("velocity must be written over (x1, x2, x3)");
    std::vector<ScalarField> comps;
    for (std::size_t i = 0; i < 3; ++i) comps.push_back(ScalarField::coordinate(x, i));
    for (std::size_t i = 0; i < 3; ++i) comps.push_back(u[i]);
    const ext::GraphMap graph(x, p.omega.chart(), comps);
    const auto w = ext::pullback(graph, p.omega);
    const auto t = ext::pullback(graph, p.theta);
    const ScalarField a = p.a.compose(comps);
    ScalarField div = zero(x);
    ScalarField uu = zero(x);
    for (std::size_t i = 0; i < 3; ++i) {
        div = div + u[i].derivative(i);
        for (std::size_t j = 0; j < 3; ++j) uu = uu + u[i].derivative(j) * u[j].derivative(i);
    }
    const ScalarField pressure = 2.0 * a + uu;  // -lap p - u_ij u_ji

    Report r;
    r.subject = "bilagrangian graph";
    auto& cw = r.add("omega|L = 0", 1e-10);
    auto& ct = r.add("theta|L = 0", 1e-10);
    double div_max = 0.0, pres_max = 0.0;
    for (const auto& pt : samples) {
        cw.observe(w.max_abs(pt), pt);
        ct.observe(t.max_abs(pt), pt);
        div_max = std::max(div_max, std::fabs(div.evaluate(pt)));
        pres_max = std::max(pres_max, std::fabs(pressure.evaluate(pt)));
    }
    r.details["div_u_max"] = div_max;
    r.details["pressure_residual_max"] = pres_max;
    r.details["fluid_equations_hold"] = div_max < 1e-10 && pres_max < 1e-10;
    return r;
}

Report integrability6(const MAStructure6& s, const std::vector<Point>& samples) {
    const auto bad = hitchin_degenerate_points(s.omega(), samples);
    if (!bad.empty()) throw DegenerateError("Hitchin pfaffian vanishes at " + format_point(bad.front()));
    const ScalarField lambda = hitchin_pfaffian(s.omega());
    const auto normalized = (1.0 / expr::sqrt(expr::sqrt_abs(lambda))) * s.omega();
    const auto d_norm = ext::ext_derivative(normalized);
    const auto d_dual = ext::ext_derivative(hitchin_dual(normalized));
    const auto g = lr_metric6(s.omega(), s.big_omega());

    Report r;
    r.subject = "integrability";
    auto& cn = r.add("d(omega/|lambda|^(1/4)) = 0", 1e-9);
    auto& cd = r.add("d(dual) = 0", 1e-9);
    for (const auto& p : samples) {
        cn.observe(d_norm.max_abs(p), p);
        cd.observe(d_dual.max_abs(p), p);
    }
    const auto flat = curv::flatness_verdict(g, samples);
    auto& cf = r.add("LR metric flat", 1e-9);
    cf.note = "sampled flatness";
    cf.residual = flat.riemann_max;
    cf.argmax = flat.witness;
    if (!flat.singular.empty()) {
        cf.residual = INFINITY;
        cf.argmax = flat.singular.front();
        cf.note = "metric singular at a sample";
    }
    return r;
}

}  // namespace mas::ma6
