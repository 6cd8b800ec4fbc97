#include "mas/ma4.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace mas::ma4 {

using ext::DegenerateError;
using ext::GraphMap;
using ext::VectorField;

namespace {

std::string format_point(const Point& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ")";
    return os.str();
}

double max_entry(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void require_dim4(const Chart& c) {
    if (c.dim() != 4) throw StructureError("four-dimensional chart required");
}

}  // namespace

MAStructure4::MAStructure4(DifferentialForm big_omega, DifferentialForm omega, const std::vector<Point>& samples)
    : big_omega_(std::move(big_omega)), omega_(std::move(omega)) {
    require_dim4(omega_.chart());
    if (!(big_omega_.chart() == omega_.chart())) throw StructureError("Omega and omega live on different charts");
    if (big_omega_.degree() != 2 || omega_.degree() != 2) throw StructureError("Omega and omega must be 2-forms");
    const auto d_big = ext::ext_derivative(big_omega_);
    const auto vol = ext::wedge(big_omega_, big_omega_);
    const auto eff = ext::wedge(omega_, big_omega_);
    for (const auto& p : samples) {
        if (d_big.max_abs(p) > 1e-12) throw StructureError("Omega is not closed at " + format_point(p));
        if (std::fabs(vol.top_coefficient().evaluate(p)) <= 1e-12)
            throw StructureError("Omega is degenerate at " + format_point(p));
        if (eff.max_abs(p) >= 1e-12) throw StructureError("omega is not effective at " + format_point(p));
    }
}

MAStructure4::MAStructure4(DifferentialForm big_omega, DifferentialForm omega)
    : MAStructure4(std::move(big_omega), std::move(omega), sample_points(4, kDefaultSamples)) {}

const Chart& euler_chart() {
    static const Chart c({"x1", "x2", "u1", "u2"});
    return c;
}

MAStructure4 euler2d(const ScalarField& a) {
    const Chart& c = euler_chart();
    if (!(a.chart() == c)) throw std::invalid_argument("euler2d: a must be written over (x1, x2, u1, u2)");
    auto big = DifferentialForm::basis(c, {0, 3}) + DifferentialForm::basis(c, {2, 1});
    auto omega = DifferentialForm::basis(c, {2, 3}) - a * DifferentialForm::basis(c, {0, 1});
    return {big, omega};
}

MAStructure4 euler2d(const std::string& a) { return euler2d(expr::parse(a, euler_chart())); }

ScalarField pfaffian(const DifferentialForm& big_omega, const DifferentialForm& omega) {
    const ScalarField num = ext::wedge(omega, omega).top_coefficient();
    const ScalarField den = ext::wedge(big_omega, big_omega).top_coefficient();
    if (den.is_zero()) throw StructureError("Omega^Omega vanishes identically");
    return num / den;
}

ScalarField pfaffian(const MAStructure4& s) { return pfaffian(s.big_omega(), s.omega()); }

const char* to_string(Type t) {
    switch (t) {
        case Type::Elliptic: return "elliptic";
        case Type::Hyperbolic: return "hyperbolic";
        case Type::Degenerate: return "degenerate";
    }
    return "?";
}

Type classify(const MAStructure4& s, const Point& point) {
    const double pf = pfaffian(s).evaluate(point);
    const double tol = 1e-10 * std::max(1.0, s.omega().max_abs(point));
    if (pf > tol) return Type::Elliptic;
    if (pf < -tol) return Type::Hyperbolic;
    return Type::Degenerate;
}

OperatorField structure_tensor(const MAStructure4& s, bool normalized) {
    OperatorField a = ext::operator_from_pair(s.big_omega(), s.omega());
    if (!normalized) return a;
    return (1.0 / expr::sqrt_abs(pfaffian(s))) * a;
}

SymmetricTensorField lr_metric(const MAStructure4& s) {
    const Chart& c = s.chart();
    const auto vol = ext::wedge(s.big_omega(), s.big_omega()).top_coefficient();
    const auto dx12 = DifferentialForm::basis(c, {0, 1});
    std::vector<DifferentialForm> iw, iW;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto e = VectorField::coordinate(c, i);
        iw.push_back(ext::interior_product(e, s.omega()));
        iW.push_back(ext::interior_product(e, s.big_omega()));
    }
    std::vector<std::vector<ScalarField>> g(4, std::vector<ScalarField>(4, ScalarField::constant(c, 0.0)));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i; j < 4; ++j) {
            const auto beta = ext::wedge(iw[i], iW[j]) + ext::wedge(iw[j], iW[i]);
            const ScalarField top = ext::wedge(beta, dx12).top_coefficient();
            g[i][j] = top.is_zero() ? top : 2.0 * top / vol;
        }
    return {c, g};
}

DifferentialForm dual_form(const MAStructure4& s) {
    const auto g = lr_metric(s);
    const auto a = structure_tensor(s, false);
    const Chart& c = s.chart();
    std::vector<std::vector<ScalarField>> m(4, std::vector<ScalarField>(4));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            ScalarField acc = ScalarField::constant(c, 0.0);
            for (std::size_t k = 0; k < 4; ++k)
                if (!g(i, k).is_zero() && !a(k, j).is_zero()) acc = acc + g(i, k) * a(k, j);
            m[i][j] = acc;
        }
    return ext::form_from_matrix(c, m);
}

HypersymplecticTriple build_triple(const MAStructure4& s, const std::vector<Point>& samples) {
    const ScalarField pf = pfaffian(s);
    int eps = 0;
    for (const auto& p : samples) {
        const double v = pf.evaluate(p);
        const double tol = 1e-10 * std::max(1.0, s.omega().max_abs(p));
        if (std::fabs(v) <= tol) throw DegenerateError("pf vanishes at " + format_point(p));
        const int sign = v > 0 ? 1 : -1;
        if (eps != 0 && sign != eps) throw DegenerateError("pf changes sign on the sample set, at " + format_point(p));
        eps = sign;
    }
    if (eps == 0) throw std::invalid_argument("build_triple: empty sample set");
    HypersymplecticTriple t;
    const ScalarField root = expr::sqrt_abs(pf);
    t.omega_tilde = root * s.big_omega();
    t.omega = s.omega();
    t.omega_hat = dual_form(s);
    t.s = ext::operator_from_pair(t.omega, t.omega_hat);
    t.i = (1.0 / root) * ext::operator_from_pair(s.big_omega(), t.omega);
    t.t = (1.0 / root) * ext::operator_from_pair(s.big_omega(), t.omega_hat);
    t.epsilon = eps;
    return t;
}

Report check_triple(const HypersymplecticTriple& t, const std::vector<Point>& samples) {
    Report r;
    r.subject = "hypersymplectic triple";
    const double eps = t.epsilon;
    const auto w2 = ext::wedge(t.omega, t.omega);
    const auto h2 = ext::wedge(t.omega_hat, t.omega_hat);
    const auto o2 = ext::wedge(t.omega_tilde, t.omega_tilde);
    const std::vector<std::pair<std::string, DifferentialForm>> forms = {
        {"w^2 = -hat^2", w2 + h2},
        {"w^2 = eps tilde^2", w2 - eps * o2},
        {"hat^2 = -eps tilde^2", h2 + eps * o2},
        {"w ^ hat = 0", ext::wedge(t.omega, t.omega_hat)},
        {"w ^ tilde = 0", ext::wedge(t.omega, t.omega_tilde)},
        {"hat ^ tilde = 0", ext::wedge(t.omega_hat, t.omega_tilde)},
    };
    for (const auto& [name, f] : forms) {
        auto& c = r.add(name, 1e-10);
        for (const auto& p : samples) c.observe(f.max_abs(p), p);
    }
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
    const char* names[] = {"S^2 = 1", "I^2 = -eps", "T^2 = eps", "TI = S", "IT = -S",
                           "TS = I",  "ST = -I",    "IS = T",    "SI = -T"};
    std::vector<Check*> checks;
    double signed_ti = 0.0;
    for (const char* n : names) checks.push_back(&r.add(n, 1e-10));
    for (const auto& p : samples) {
        const Eigen::MatrixXd s = t.s.evaluate(p);
        const Eigen::MatrixXd i = t.i.evaluate(p);
        const Eigen::MatrixXd tt = t.t.evaluate(p);
        const Eigen::MatrixXd res[] = {s * s - id, i * i + eps * id, tt * tt - eps * id, tt * i - s, i * tt + s,
                                       tt * s - i, s * tt + i,       i * s - tt,         s * i + tt};
        for (std::size_t k = 0; k < checks.size(); ++k) checks[k]->observe(max_entry(res[k]), p);
        signed_ti = std::max(signed_ti, max_entry(tt * i - eps * s));
    }
    // With I^2 = +1, IS = T and SI = -T force TI = ISI = -S, so the unsigned
    // TI = S cannot hold when eps = -1. Report the signed form alongside.
    r.details["TI = eps S"] = signed_ti;
    r.details["epsilon"] = t.epsilon;
    return r;
}

Report integrability(const MAStructure4& s, const std::vector<Point>& samples) {
    const ScalarField pf = pfaffian(s);
    for (const auto& p : samples)
        if (std::fabs(pf.evaluate(p)) <= 1e-10 * std::max(1.0, s.omega().max_abs(p)))
            throw DegenerateError("pf vanishes at " + format_point(p));
    const auto closure = ext::ext_derivative((1.0 / expr::sqrt_abs(pf)) * s.omega());
    const auto dpf = ext::ext_derivative(DifferentialForm::function(pf));
    Report r;
    r.subject = "integrability";
    auto& c = r.add("d(omega/sqrt|pf|) = 0", 1e-9);
    double da = 0.0;
    for (const auto& p : samples) {
        c.observe(closure.max_abs(p), p);
        da = std::max(da, dpf.max_abs(p));
    }
    r.details["integrable"] = c.pass();
    r.details["d_pf_max"] = da;
    r.details["pf_constant"] = da < 1e-12;
    r.details["note"] = "the product structure S is always integrable";
    return r;
}

GraphMap stream_graph(const Chart& target, const ScalarField& psi) {
    if (psi.chart().dim() != 2) throw std::invalid_argument("stream function must be written over two coordinates");
    const Chart& src = psi.chart();
    return {src, target,
            {ScalarField::coordinate(src, 0), ScalarField::coordinate(src, 1), -psi.derivative(1),
             psi.derivative(0)}};
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

Report verify_generalized_solution(const MAStructure4& s, const ScalarField& psi, const std::vector<Point>& samples) {
    const GraphMap graph = stream_graph(s.chart(), psi);
    const auto big_l = ext::pullback(graph, s.big_omega());
    const auto omega_l = ext::pullback(graph, s.omega());
    const auto h = ext::pullback_symmetric(graph, lr_metric(s));
    const ScalarField pf_l = pfaffian(s).compose(graph.components());
    const ScalarField det_h = h(0, 0) * h(1, 1) - h(0, 1) * h(0, 1);
    const ScalarField tr_h = h(0, 0) + h(1, 1);
    const ScalarField lap_psi = psi.derivative(std::vector<int>{0, 0}) + psi.derivative(std::vector<int>{1, 1});

    Report r;
    r.subject = "generalized solution";
    auto& c_big = r.add("Omega|L = 0", 1e-10);
    auto& c_w = r.add("omega|L = 0", 1e-10);
    auto& c_det = r.add("det h = 2 lap p", 1e-10);
    auto& c_tr = r.add("tr h = 2 lap psi", 1e-10);
    auto& c_sig = r.add("signature of h", 0.5);
    c_sig.note = "definite where pf > 0, (1,1) where pf < 0";
    nlohmann::json sigs = nlohmann::json::object();
    for (const auto& p : samples) {
        c_big.observe(big_l.max_abs(p), p);
        c_w.observe(omega_l.max_abs(p), p);
        const double pf = pf_l.evaluate(p);
        c_det.observe(det_h.evaluate(p) - 2.0 * (2.0 * pf), p);
        c_tr.observe(tr_h.evaluate(p) - 2.0 * lap_psi.evaluate(p), p);
        const Signature sg = signature(h.evaluate(p));
        bool ok = true;
        if (pf > 0) ok = sg.zero == 0 && (sg.positive == 2 || sg.negative == 2);
        if (pf < 0) ok = sg.positive == 1 && sg.negative == 1;
        c_sig.observe(ok ? 0.0 : 1.0, p);
        const std::string key = "(" + std::to_string(sg.positive) + "," + std::to_string(sg.negative) + ")";
        sigs[key] = sigs.value(key, 0) + 1;
    }
    r.details["signatures"] = sigs;
    if (!samples.empty()) {
        const auto& p = samples.front();
        const Eigen::MatrixXd hm = h.evaluate(p);
        r.details["h_at_first_sample"] = {{hm(0, 0), hm(0, 1)}, {hm(1, 0), hm(1, 1)}};
        r.details["det_h_at_first_sample"] = det_h.evaluate(p);
        r.details["tr_h_at_first_sample"] = tr_h.evaluate(p);
    }
    return r;
}

}  // namespace mas::ma4
