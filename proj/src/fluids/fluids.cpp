#include "mas/fluids.hpp"

#include "mas/ma6.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace mas::fluids {

namespace {

// psi over (x1, x2) lifted to (x1, x2, x3).
ScalarField lift(const ScalarField& f, const Chart& target) {
    return f.compose({ScalarField::coordinate(target, 0), ScalarField::coordinate(target, 1)});
}

void require_plane(const ScalarField& f, const char* what) {
    if (f.chart().dim() != 2) throw std::invalid_argument(std::string(what) + " must be written over (x1, x2)");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_double(const std::string& s, std::size_t row) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw GridError("row " + std::to_string(row) + ": not a number: '" + s + "'");
    return v;
}

// Fourth-order centered first and second differences.
double d1(double m2, double m1, double p1, double p2, double h) { return (m2 - 8 * m1 + 8 * p1 - p2) / (12 * h); }
double d2(double m2, double m1, double c, double p1, double p2, double h) {
    return (-m2 + 16 * m1 - 30 * c + 16 * p1 - p2) / (12 * h * h);
}

}  // namespace

const Chart& plane_chart() {
    static const Chart c({"x1", "x2"});
    return c;
}

Flow2D flow2d(const ScalarField& psi) {
    require_plane(psi, "psi");
    return {psi, VectorField(psi.chart(), {-psi.derivative(1), psi.derivative(0)})};
}

Eigen::MatrixXd velocity_gradient(const VectorField& u, const Point& x) {
    const std::size_t n = u.chart().dim();
    if (n != 2 && n != 3) throw std::invalid_argument("velocity must have two or three components");
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto jet = u[i].eval_jet(x, 1);
        for (std::size_t j = 0; j < n; ++j) m(i, j) = jet.d(static_cast<int>(j));
    }
    return m;
}

double pressure_rhs(const VectorField& u, const Point& x) {
    const auto m = velocity_gradient(u, x);
    return -(m * m).trace();
}

WeissSplit weiss_split(const Eigen::MatrixXd& m) {
    WeissSplit w;
    const Eigen::MatrixXd s = (m + m.transpose()) / 2;
    w.strain_sq = (s * s).trace();
    if (m.rows() == 2) {
        w.vorticity = Eigen::VectorXd::Constant(1, m(1, 0) - m(0, 1));
    } else {
        w.vorticity = Eigen::Vector3d(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
    }
    w.rhs = w.vorticity.squaredNorm() / 2 - w.strain_sq;
    return w;
}

WeissSplit weiss_split(const VectorField& u, const Point& x) { return weiss_split(velocity_gradient(u, x)); }

double ma_residual_2d(const ScalarField& psi, const ScalarField& a, const Point& x) {
    require_plane(psi, "psi");
    const auto j = psi.eval_jet(x, 2);
    return j.d(0, 0) * j.d(1, 1) - j.d(0, 1) * j.d(0, 1) - a.evaluate(x);
}

ScalarField extended_stream(const ScalarField& psi, double gamma) {
    require_plane(psi, "psi");
    const Chart& s = ma6::space_chart();
    const auto x3 = ScalarField::coordinate(s, 2);
    return lift(psi, s) - (0.375 * gamma * gamma) * (x3 * x3);
}

BurgersFlow burgers_build(double gamma, const ScalarField& psi, double c) {
    require_plane(psi, "psi");
    const Chart& s = ma6::space_chart();
    const auto x1 = ScalarField::coordinate(s, 0), x2 = ScalarField::coordinate(s, 1);
    const auto x3 = ScalarField::coordinate(s, 2);
    const auto p1 = lift(psi.derivative(0), s), p2 = lift(psi.derivative(1), s);
    BurgersFlow f;
    f.gamma = gamma;
    f.c = c;
    f.psi = psi;
    f.u = VectorField(s, {-(gamma / 2) * x1 - p2, -(gamma / 2) * x2 + p1, gamma * x3 - c});
    return f;
}

Report prop5_verify(double gamma, const ScalarField& psi, double c, const ScalarField& a,
                    const std::vector<Point>& samples) {
    require_plane(psi, "psi");
    require_plane(a, "a");
    const auto flow = burgers_build(gamma, psi, c);
    const double shift = 0.75 * gamma * gamma;

    Report r;
    r.subject = "Burgers flow from a stream function";
    auto& c1 = r.add("(i) det Hess psi = lap p / 2 + 3 gamma^2 / 4", 1e-10);
    auto& c2 = r.add("(ii) -u_ij u_ji = lap p", 1e-10);
    for (const auto& x : samples) {
        if (x.size() != 3) throw std::invalid_argument("samples must be points of (x1, x2, x3)");
        const Point q{x[0], x[1]};
        c1.observe(ma_residual_2d(psi, a + shift, q), x);
        c2.observe(pressure_rhs(flow.u, x) - 2 * a.evaluate(q), x);
    }
    const auto pair = ma6::euler3d_pair(lift(a, ma6::fluid_chart()));
    const auto bl = ma6::verify_bilagrangian(pair, flow.u, samples);
    for (const auto& chk : bl.checks) {
        auto& c3 = r.add("(iii) " + chk.name, chk.tolerance);
        c3.residual = chk.residual;
        c3.argmax = chk.argmax;
    }

    nlohmann::json failed = nullptr;
    for (const auto& chk : r.checks)
        if (!chk.pass()) {
            failed = chk.name.substr(0, chk.name.find(' '));
            break;
        }
    r.details["failed_stage"] = failed;
    r.details["gamma"] = gamma;
    r.details["c"] = c;
    r.details["u"] = {flow.u[0].render(), flow.u[1].render(), flow.u[2].render()};
    r.details["div_u_max"] = bl.details["div_u_max"];
    return r;
}

std::size_t GridField::size() const {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
}

Point GridField::position(std::size_t node) const {
    Point x(static_cast<std::size_t>(dim));
    for (std::size_t k = static_cast<std::size_t>(dim); k-- > 0;) {
        x[k] = origin[k] + static_cast<double>(node % shape[k]) * spacing[k];
        node /= shape[k];
    }
    return x;
}

GridField grid_read(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw GridError("empty grid file");
    const auto header = split(line);
    const std::vector<std::string> h2{"x1", "x2", "u1", "u2"}, h3{"x1", "x2", "x3", "u1", "u2", "u3"};
    GridField g;
    std::vector<std::string> base(header.begin(), header.end());
    const bool has_p = !base.empty() && base.back() == "p";
    if (has_p) base.pop_back();
    if (base == h2) {
        g.dim = 2;
    } else if (base == h3) {
        g.dim = 3;
    } else {
        throw GridError("header must be x1,x2[,x3],u1,u2[,u3][,p], got '" + trim(line) + "'");
    }
    const auto d = static_cast<std::size_t>(g.dim);
    const std::size_t cols = header.size();

    std::vector<std::vector<double>> rows;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != cols)
            throw GridError("row " + std::to_string(row) + ": expected " + std::to_string(cols) + " columns");
        std::vector<double> v;
        for (const auto& c : cells) v.push_back(to_double(c, row));
        rows.push_back(std::move(v));
    }
    if (rows.empty()) throw GridError("grid has no rows");

    g.shape.resize(d);
    g.origin.resize(d);
    g.spacing.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> xs;
        for (const auto& r : rows) xs.push_back(r[k]);
        std::sort(xs.begin(), xs.end());
        const double span = xs.back() - xs.front();
        const double tol = 1e-9 * std::max(1.0, span);
        std::vector<double> uniq{xs.front()};
        for (double x : xs)
            if (x - uniq.back() > tol) uniq.push_back(x);
        if (uniq.size() < 4) throw GridError("axis x" + std::to_string(k + 1) + " has fewer than 4 nodes");
        const double h = span / static_cast<double>(uniq.size() - 1);
        for (std::size_t i = 1; i < uniq.size(); ++i)
            if (std::fabs(uniq[i] - uniq[i - 1] - h) > 1e-9 * std::max(1.0, h))
                throw GridError("axis x" + std::to_string(k + 1) + " is not uniformly spaced");
        g.shape[k] = uniq.size();
        g.origin[k] = uniq.front();
        g.spacing[k] = h;
    }
    if (rows.size() != g.size())
        throw GridError("row count " + std::to_string(rows.size()) + " does not match shape product " +
                        std::to_string(g.size()));

    g.u.assign(d, std::vector<double>(rows.size()));
    if (has_p) g.p = std::vector<double>(rows.size());
    for (std::size_t n = 0; n < rows.size(); ++n) {
        const auto x = g.position(n);
        for (std::size_t k = 0; k < d; ++k)
            if (std::fabs(rows[n][k] - x[k]) > 1e-9 * std::max(1.0, std::fabs(x[k])))
                throw GridError("row " + std::to_string(n + 2) + " is out of lattice order");
        for (std::size_t k = 0; k < d; ++k) g.u[k][n] = rows[n][d + k];
        if (has_p) (*g.p)[n] = rows[n][2 * d];
    }
    return g;
}

GridField grid_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GridError("cannot open " + path);
    return grid_read(in);
}

void grid_write(std::ostream& out, const GridField& g) {
    const auto d = static_cast<std::size_t>(g.dim);
    for (std::size_t k = 0; k < d; ++k) out << (k ? "," : "") << "x" << k + 1;
    for (std::size_t k = 0; k < d; ++k) out << ",u" << k + 1;
    if (g.p) out << ",p";
    out << "\n" << std::setprecision(17);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto x = g.position(n);
        for (std::size_t k = 0; k < d; ++k) out << (k ? "," : "") << x[k];
        for (std::size_t k = 0; k < d; ++k) out << "," << g.u[k][n];
        if (g.p) out << "," << (*g.p)[n];
        out << "\n";
    }
}

Axis parse_axis(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string s;
    while (std::getline(ss, s, ':')) parts.push_back(trim(s));
    if (parts.size() != 3) throw std::invalid_argument("axis must be min:max:n, got '" + spec + "'");
    Axis a;
    try {
        std::size_t used = 0;
        a.lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument(spec);
        a.hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(spec);
        const long n = std::stol(parts[2], &used);
        if (used != parts[2].size() || n < 2) throw std::invalid_argument(spec);
        a.n = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw std::invalid_argument("axis must be min:max:n with n >= 2, got '" + spec + "'");
    }
    if (!(a.hi > a.lo)) throw std::invalid_argument("axis needs min < max, got '" + spec + "'");
    return a;
}

GridField grid_sample(const VectorField& u, const std::vector<Axis>& axes, const ScalarField* p) {
    const std::size_t d = u.chart().dim();
    if (axes.size() != d) throw std::invalid_argument("one axis per velocity component required");
    GridField g;
    g.dim = static_cast<int>(d);
    for (const auto& a : axes) {
        g.shape.push_back(a.n);
        g.origin.push_back(a.lo);
        g.spacing.push_back((a.hi - a.lo) / static_cast<double>(a.n - 1));
    }
    g.u.assign(d, std::vector<double>(g.size()));
    if (p) g.p = std::vector<double>(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto x = g.position(n);
        for (std::size_t k = 0; k < d; ++k) g.u[k][n] = u[k].evaluate(x);
        if (p) (*g.p)[n] = p->evaluate(x);
    }
    return g;
}

std::string to_string(NodeClass c) {
    switch (c) {
    case NodeClass::Elliptic: return "elliptic";
    case NodeClass::Hyperbolic: return "hyperbolic";
    case NodeClass::Degenerate: return "degenerate";
    }
    return "?";
}

GridAnalysis grid_analyze(const GridField& g) {
    const auto d = static_cast<std::size_t>(g.dim);
    GridAnalysis out;
    out.dim = g.dim;
    out.total = g.size();
    std::vector<std::size_t> stride(d, 1);
    for (std::size_t k = d - 1; k-- > 0;) stride[k] = stride[k + 1] * g.shape[k + 1];

    double scale = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
        std::vector<std::size_t> idx(d);
        std::size_t rest = n;
        bool interior = true;
        for (std::size_t k = d; k-- > 0;) {
            idx[k] = rest % g.shape[k];
            rest /= g.shape[k];
            interior = interior && idx[k] >= 2 && idx[k] + 2 < g.shape[k];
        }
        if (!interior) {
            ++out.missing;
            continue;
        }
        Eigen::MatrixXd m(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            const auto& f = g.u[i];
            for (std::size_t j = 0; j < d; ++j) {
                const std::size_t s = stride[j];
                m(i, j) = d1(f[n - 2 * s], f[n - s], f[n + s], f[n + 2 * s], g.spacing[j]);
            }
        }
        GridNode node;
        node.index = n;
        node.x = g.position(n);
        node.div = m.trace();
        const auto w = weiss_split(m);
        node.vorticity = w.vorticity;
        node.strain_sq = w.strain_sq;
        node.weiss_rhs = w.rhs;
        node.rhs = -(m * m).trace();
        if (g.p) {
            const auto& p = *g.p;
            double lap = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const std::size_t s = stride[j];
                lap += d2(p[n - 2 * s], p[n - s], p[n], p[n + s], p[n + 2 * s], g.spacing[j]);
            }
            node.lap_p = lap;
        }
        scale = std::max({scale, std::fabs(node.rhs), m.cwiseAbs().maxCoeff()});
        out.nodes.push_back(std::move(node));
    }

    double rhs_max = 0.0;
    for (const auto& n : out.nodes) rhs_max = std::max(rhs_max, std::fabs(n.rhs));
    out.degenerate_tol = 1e-8 * std::max(1.0, rhs_max);
    for (auto& n : out.nodes)
        n.cls = n.rhs > out.degenerate_tol    ? NodeClass::Elliptic
                : n.rhs < -out.degenerate_tol ? NodeClass::Hyperbolic
                                              : NodeClass::Degenerate;

    out.report.subject = "grid diagnostics";
    auto& cd = out.report.add("div u = 0", 1e-8 * std::max(1.0, scale));
    cd.note = "fourth-order centered differences at interior nodes";
    for (const auto& n : out.nodes) cd.observe(n.div, n.x);
    if (out.nodes.empty()) cd.note = "no interior nodes";
    return out;
}

nlohmann::json GridAnalysis::to_json(bool full) const {
    using nlohmann::json;
    std::vector<std::pair<std::string, std::function<double(const GridNode&)>>> fields{
        {"div", [](const GridNode& n) { return n.div; }},
        {"rhs", [](const GridNode& n) { return n.rhs; }},
    };
    if (dim == 2) {
        fields.emplace_back("zeta", [](const GridNode& n) { return n.vorticity(0); });
        fields.emplace_back("tr_s2", [](const GridNode& n) { return n.strain_sq; });
        fields.emplace_back("weiss_rhs", [](const GridNode& n) { return n.weiss_rhs; });
    }
    const bool has_p = !nodes.empty() && nodes.front().lap_p.has_value();
    if (has_p) {
        fields.emplace_back("lap_p", [](const GridNode& n) { return *n.lap_p; });
        fields.emplace_back("lap_p_minus_rhs", [](const GridNode& n) { return *n.lap_p - n.rhs; });
    }

    json summary = json::object();
    for (const auto& [name, get] : fields) {
        if (nodes.empty()) {
            summary[name] = nullptr;
            continue;
        }
        double lo = INFINITY, hi = -INFINITY, sum = 0.0;
        for (const auto& n : nodes) {
            const double v = get(n);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        summary[name] = {{"min", lo}, {"max", hi}, {"mean", sum / static_cast<double>(nodes.size())}};
    }
    std::size_t ell = 0, hyp = 0, deg = 0;
    for (const auto& n : nodes) (n.cls == NodeClass::Elliptic ? ell : n.cls == NodeClass::Hyperbolic ? hyp : deg)++;

    json out = report.to_json();
    out["dim"] = dim;
    out["nodes_total"] = total;
    out["nodes_interior"] = nodes.size();
    out["nodes_missing"] = missing;
    out["degenerate_tolerance"] = degenerate_tol;
    out["summary"] = summary;
    out["counts"] = {{"elliptic", ell}, {"hyperbolic", hyp}, {"degenerate", deg}};
    if (full) {
        json arr = json::array();
        for (const auto& n : nodes) {
            json j{{"index", n.index}, {"x", n.x}, {"class", to_string(n.cls)}};
            for (const auto& [name, get] : fields) j[name] = get(n);
            if (dim == 3) j["vorticity"] = std::vector<double>(n.vorticity.data(), n.vorticity.data() + 3);
            arr.push_back(std::move(j));
        }
        out["nodes"] = arr;
    }
    return out;
}

}  // namespace mas::fluids
