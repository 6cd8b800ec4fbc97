#include "mas/curvature.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace mas::curv {

namespace {

// Metric, inverse and first/second partials at a point.
struct MetricJet {
    std::size_t n = 0;
    Eigen::MatrixXd g, ginv;
    std::vector<Eigen::MatrixXd> d;                // d[m](i, j) = d_m g_ij
    std::vector<std::vector<Eigen::MatrixXd>> dd;  // dd[m][q](i, j)
};

MetricJet metric_jet(const SymmetricTensorField& field, const Point& p, int order) {
    MetricJet j;
    j.n = field.dim();
    const std::size_t n = j.n;
    if (p.size() != n) throw std::invalid_argument("point dimension does not match the metric chart");
    j.g = Eigen::MatrixXd::Zero(n, n);
    j.d.assign(n, Eigen::MatrixXd::Zero(n, n));
    if (order >= 2) j.dd.assign(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            const auto& f = field(a, b);
            if (f.is_zero()) continue;
            const auto jet = f.eval_jet(p, order);
            j.g(a, b) = j.g(b, a) = jet.value();
            for (std::size_t m = 0; m < n; ++m) {
                const int im = static_cast<int>(m);
                j.d[m](a, b) = j.d[m](b, a) = jet.d(im);
                if (order >= 2)
                    for (std::size_t q = m; q < n; ++q) {
                        const double v = jet.d(im, static_cast<int>(q));
                        j.dd[m][q](a, b) = j.dd[m][q](b, a) = v;
                        j.dd[q][m](a, b) = j.dd[q][m](b, a) = v;
                    }
            }
        }
    const double scale = std::max(1e-300, j.g.cwiseAbs().maxCoeff());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(j.g);
    if (j.g.isZero(0.0) || std::fabs(lu.determinant()) <= 1e-12 * std::pow(scale, static_cast<double>(n)))
        throw SingularMetricError("metric is singular at the requested point");
    j.ginv = lu.inverse();
    return j;
}

// Christoffel symbols of the first kind: c(l, i, j) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij).
Tensor first_kind(const MetricJet& j) {
    Tensor c(j.n, 3);
    for (std::size_t l = 0; l < j.n; ++l)
        for (std::size_t a = 0; a < j.n; ++a)
            for (std::size_t b = 0; b < j.n; ++b)
                c(l, a, b) = 0.5 * (j.d[a](b, l) + j.d[b](a, l) - j.d[l](a, b));
    return c;
}

Tensor raise(const MetricJet& j, const Tensor& c) {
    Tensor g(j.n, 3);
    for (std::size_t k = 0; k < j.n; ++k)
        for (std::size_t a = 0; a < j.n; ++a)
            for (std::size_t b = 0; b < j.n; ++b) {
                double s = 0.0;
                for (std::size_t l = 0; l < j.n; ++l) s += j.ginv(k, l) * c(l, a, b);
                g(k, a, b) = s;
            }
    return g;
}

}  // namespace

Tensor::Tensor(std::size_t n, int rank) : n_(n), rank_(rank), v_(static_cast<std::size_t>(std::pow(n, rank)), 0.0) {}

double Tensor::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::fabs(x));
    return m;
}

Tensor christoffel(const SymmetricTensorField& g, const Point& point) {
    const auto j = metric_jet(g, point, 1);
    return raise(j, first_kind(j));
}

Tensor riemann(const SymmetricTensorField& g, const Point& point) {
    const auto j = metric_jet(g, point, 2);
    const std::size_t n = j.n;
    const Tensor c = first_kind(j);
    const Tensor gam = raise(j, c);
    // dgam[m](k, a, b) = d_m Gamma^k_ab.
    std::vector<Tensor> dgam(n, Tensor(n, 3));
    for (std::size_t m = 0; m < n; ++m) {
        const Eigen::MatrixXd dinv = -j.ginv * j.d[m] * j.ginv;
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) {
                    double s = 0.0;
                    for (std::size_t l = 0; l < n; ++l) {
                        const double dc = 0.5 * (j.dd[m][a](b, l) + j.dd[m][b](a, l) - j.dd[m][l](a, b));
                        s += dinv(k, l) * c(l, a, b) + j.ginv(k, l) * dc;
                    }
                    dgam[m](k, a, b) = s;
                }
    }
    Tensor r(n, 4);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t k = 0; k < n; ++k) {
                    double s = dgam[a](l, b, k) - dgam[b](l, a, k);
                    for (std::size_t m = 0; m < n; ++m) s += gam(l, a, m) * gam(m, b, k) - gam(l, b, m) * gam(m, a, k);
                    r(l, a, b, k) = s;
                }
    return r;
}

Eigen::MatrixXd ricci(const SymmetricTensorField& g, const Point& point) {
    const Tensor r = riemann(g, point);
    const std::size_t n = r.dim();
    Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t i = 0; i < n; ++i) ric(a, b) += r(i, i, a, b);
    return ric;
}

FlatnessVerdict flatness_verdict(const SymmetricTensorField& g, const std::vector<Point>& samples) {
    FlatnessVerdict v;
    for (const auto& p : samples) {
        try {
            const Tensor r = riemann(g, p);
            const double scale = std::max(1.0, g.evaluate(p).cwiseAbs().maxCoeff());
            const double m = r.max_abs() / scale;
            if (v.witness.empty() || m > v.riemann_max) {
                v.riemann_max = m;
                v.witness = p;
            }
        } catch (const SingularMetricError&) {
            v.singular.push_back(p);
        }
    }
    v.flat = v.riemann_max < 1e-9;
    return v;
}

Report curvature_report(const SymmetricTensorField& g, const std::vector<Point>& samples) {
    Report r;
    r.subject = "curvature";
    auto& ric = r.add("Ricci = 0", 1e-9);
    auto& riem = r.add("Riemann = 0", 1e-9);
    riem.note = "sampled flatness";
    nlohmann::json singular = nlohmann::json::array();
    for (const auto& p : samples) {
        try {
            const Tensor rm = riemann(g, p);
            const std::size_t n = rm.dim();
            Eigen::MatrixXd rc = Eigen::MatrixXd::Zero(n, n);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    for (std::size_t i = 0; i < n; ++i) rc(a, b) += rm(i, i, a, b);
            const double scale = std::max(1.0, g.evaluate(p).cwiseAbs().maxCoeff());
            ric.observe(rc.cwiseAbs().maxCoeff() / scale, p);
            riem.observe(rm.max_abs() / scale, p);
        } catch (const SingularMetricError&) {
            singular.push_back(p);
        }
    }
    r.details = {{"ricci_max", ric.residual},
                 {"riemann_max", riem.residual},
                 {"verdicts", {{"ricci_flat", ric.pass()}, {"flat", riem.pass()}}},
                 {"witnesses", {{"ricci", ric.argmax}, {"riemann", riem.argmax}}},
                 {"singular_points", singular}};
    return r;
}

}  // namespace mas::curv
