#include "mas/cli.hpp"

#include "mas/curvature.hpp"
#include "mas/fluids.hpp"
#include "mas/form_json.hpp"
#include "mas/ma4.hpp"
#include "mas/ma6.hpp"
#include "mas/reduction.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

namespace mas::cli {

namespace {

using nlohmann::json;
using expr::Chart;
using expr::ScalarField;
using ext::DifferentialForm;

constexpr int kReportVersion = 1;

struct Config {
    std::uint64_t seed = kDefaultSeed;
    int samples = kDefaultSamples;
    bool json = false;
    std::optional<double> tol;
    std::string output;
};

// Reports plus command-specific payload.
struct Outcome {
    std::vector<Report> reports;
    json extra = json::object();
};

// Raised for malformed flags that pass CLI11 but not our own checks.
class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

std::vector<Point> samples(const Config& cfg, std::size_t dim) { return sample_points(dim, cfg.samples, cfg.seed); }

Point parse_point(const std::string& s, std::size_t dim) {
    Point p;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            p.push_back(std::stod(cell, &used));
            if (cell.find_first_not_of(" \t", used) != std::string::npos) throw InputError(cell);
        } catch (const std::exception&) {
            throw InputError("point coordinate is not a number: '" + cell + "'");
        }
    }
    if (p.size() != dim)
        throw InputError("point needs " + std::to_string(dim) + " coordinates, got " + std::to_string(p.size()));
    return p;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    return out;
}

std::vector<Point> lattice(const std::string& spec, std::size_t dim) {
    const auto parts = split(spec, ',');
    if (parts.size() != dim) throw InputError("grid needs one min:max:n spec per axis");
    std::vector<fluids::Axis> axes;
    for (const auto& p : parts) axes.push_back(fluids::parse_axis(p));
    std::vector<Point> pts{Point{}};
    for (const auto& a : axes) {
        std::vector<Point> next;
        for (const auto& p : pts)
            for (std::size_t i = 0; i < a.n; ++i) {
                Point q = p;
                q.push_back(a.lo + (a.hi - a.lo) * static_cast<double>(i) / static_cast<double>(a.n - 1));
                next.push_back(std::move(q));
            }
        pts = std::move(next);
    }
    return pts;
}

// f over (x1, x2) as a field over a chart whose first two coordinates are x1, x2.
ScalarField lift(const ScalarField& f, const Chart& target) {
    return f.compose({ScalarField::coordinate(target, 0), ScalarField::coordinate(target, 1)});
}

Check& add_residual(Report& r, const std::string& name, double tol, const DifferentialForm& f,
                    const std::vector<Point>& pts) {
    auto& c = r.add(name, tol);
    for (const auto& p : pts) c.observe(f.max_abs(p), p);
    return c;
}

DifferentialForm two_form(const Chart& c, const std::string& coef, const std::string& u, const std::string& v) {
    return DifferentialForm::from_terms(c, 2, {{coef, {u, v}}});
}

// ---------------------------------------------------------------- commands

Report pfaffian_report(const ma4::MAStructure4& s, const ScalarField& a, const std::vector<Point>& pts, double sign) {
    const auto pf = ma4::pfaffian(s);
    const auto pf_hat = ma4::pfaffian(s.big_omega(), ma4::dual_form(s));
    Report r;
    r.subject = "pfaffians";
    auto& c1 = r.add("pf(omega) = a", 1e-12);
    auto& c2 = r.add("pf(hat omega) = -a", 1e-12);
    for (const auto& p : pts) {
        const double av = a.evaluate(p);
        c1.observe(pf.evaluate(p) - sign * av, p);
        c2.observe(pf_hat.evaluate(p) + av, p);
    }
    return r;
}

Outcome cmd_classify(const Config&, const std::string& psi_src, const std::string& a_src, const std::string& at,
                     const std::string& grid) {
    if (psi_src.empty() == a_src.empty()) throw InputError("give exactly one of --psi and --a");
    if (!at.empty() && !grid.empty()) throw InputError("give at most one of --at and --grid");
    const Chart& plane = fluids::plane_chart();
    ScalarField a;
    if (!psi_src.empty()) {
        const auto psi = expr::parse(psi_src, plane);
        a = psi.derivative({0, 0}) * psi.derivative({1, 1}) - psi.derivative({0, 1}) * psi.derivative({0, 1});
    } else {
        a = expr::parse(a_src, plane);
    }
    const auto s = ma4::euler2d(lift(a, ma4::euler_chart()));
    std::vector<Point> pts;
    if (!grid.empty()) {
        pts = lattice(grid, 2);
    } else {
        pts.push_back(at.empty() ? Point{0.0, 0.0} : parse_point(at, 2));
    }
    Outcome o;
    json list = json::array();
    std::map<std::string, int> counts{{"elliptic", 0}, {"hyperbolic", 0}, {"degenerate", 0}};
    for (const auto& p : pts) {
        const std::string cls = ma4::to_string(ma4::classify(s, {p[0], p[1], 0.0, 0.0}));
        ++counts[cls];
        list.push_back({{"x", p}, {"a", a.evaluate(p)}, {"class", cls}});
    }
    o.extra["a"] = a.render();
    o.extra["points"] = list;
    o.extra["counts"] = counts;
    Report r;
    r.subject = "classification";
    o.reports.push_back(std::move(r));
    return o;
}

Outcome cmd_triple(const Config& cfg, const std::string& a_src) {
    const auto a = expr::parse(a_src, ma4::euler_chart());
    const auto pts = samples(cfg, 4);
    const auto s = ma4::euler2d(a);
    Outcome o;
    o.reports.push_back(pfaffian_report(s, a, pts, 1.0));
    const auto t = ma4::build_triple(s, pts);
    o.reports.push_back(ma4::check_triple(t, pts));
    o.extra["epsilon"] = t.epsilon;
    o.extra["omega_hat"] = t.omega_hat.render();
    return o;
}

ma6::MAStructure6 catalog6(const std::string& name, const std::string& a_src) {
    if (name == "hess1") return ma6::hess1();
    if (name == "speciallag") return ma6::speciallag();
    if (name == "burgers-cy") return ma6::burgers_cy(a_src);
    throw InputError("unknown structure '" + name + "'");
}

json lambda_summary(const DifferentialForm& w, const std::vector<Point>& pts) {
    const auto lambda = ma6::hitchin_pfaffian(w, pts);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& p : pts) {
        lo = std::min(lo, lambda.evaluate(p));
        hi = std::max(hi, lambda.evaluate(p));
    }
    return {{"min", lo}, {"max", hi}, {"degenerate_points", ma6::hitchin_degenerate_points(w, pts).size()}};
}

Outcome cmd_hitchin(const Config& cfg, const std::string& name, const std::string& a_src, bool emit,
                    bool integrability) {
    const auto pts = samples(cfg, 6);
    Outcome o;
    if (name == "euler3d-pair") {
        const auto pair = ma6::euler3d_pair(a_src);
        o.reports.push_back(ma6::euler_pair_relations(pair, pts));
        o.extra["lambda_omega"] = lambda_summary(pair.omega, pts);
        o.extra["lambda_theta"] = lambda_summary(pair.theta, pts);
        if (emit)
            o.extra["forms"] = {{"Omega", ext::to_json(pair.big_omega)},
                                {"omega", ext::to_json(pair.omega)},
                                {"theta", ext::to_json(pair.theta)}};
        return o;
    }
    const auto s = catalog6(name, a_src);
    o.extra["lambda"] = lambda_summary(s.omega(), pts);
    o.reports.push_back(ma6::lr_compatibility(s.omega(), s.big_omega(), pts));

    const auto g = ma6::lr_metric6(s.omega(), s.big_omega());
    std::map<std::string, int> sigs;
    for (const auto& p : pts) {
        const auto sg = ma6::signature(g.evaluate(p));
        ++sigs["(" + std::to_string(sg.positive) + "," + std::to_string(sg.negative) + ")"];
    }
    o.extra["signatures"] = sigs;

    const auto hat = ma6::hitchin_dual(s.omega(), pts);
    Report d;
    d.subject = "Hitchin dual";
    add_residual(d, "dual of dual = -omega", 1e-12, ma6::hitchin_dual(hat) + s.omega(), pts);
    add_residual(d, "hat ^ Omega = 0", 1e-12, ext::wedge(hat, s.big_omega()), pts);
    o.reports.push_back(std::move(d));
    o.extra["omega_plus_hat"] = (s.omega() + hat).render();
    o.extra["omega_minus_hat"] = (s.omega() - hat).render();
    if (integrability) o.reports.push_back(ma6::integrability6(s, pts));
    if (emit) o.extra["forms"] = {{"Omega", ext::to_json(s.big_omega())}, {"omega", ext::to_json(s.omega())}};
    return o;
}

Outcome cmd_reduce(const Config& cfg, const std::string& action, const std::string& a_src, double gamma, double c) {
    const auto pts6 = samples(cfg, 6);
    const auto pts4 = samples(cfg, 4);
    Outcome o;
    if (action == "laplace3d") {
        const auto s = red::laplace3d();
        const auto act = red::translation_action(s.big_omega(), {0, 0, 1, 0, 0, 0}, c);
        const auto w = red::reduce(s.omega(), act, pts6);
        const auto big = red::reduced_symplectic(s.big_omega(), act);
        const Chart& rc = act.reduced;
        Report r;
        r.subject = "Laplace reduction";
        add_residual(r, "omega_c = dxi1^dx2 + dx1^dxi2", 1e-12,
                     w - (two_form(rc, "1", "xi1", "x2") + two_form(rc, "1", "x1", "xi2")), pts4);
        add_residual(r, "Omega_c = dx1^dxi1 + dx2^dxi2", 1e-12,
                     big - (two_form(rc, "1", "x1", "xi1") + two_form(rc, "1", "x2", "xi2")), pts4);
        add_residual(r, "omega_c ^ Omega_c = 0", 1e-12, ext::wedge(w, big), pts4);
        o.reports.push_back(std::move(r));
        o.extra["moment"] = act.moment.render();
        o.extra["omega_c"] = w.render();
        o.extra["Omega_c"] = big.render();
        return o;
    }
    if (action == "euler-pair") {
        const auto pair = ma6::euler3d_pair(a_src);
        const auto rp = red::reduce_euler_pair(pair, gamma, c, pts6);
        const Chart& rc = rp.omega_c.chart();
        const auto omega = rp.a * two_form(rc, "1", "x1", "x2") - two_form(rc, "1", "u1", "u2") -
                           gamma * two_form(rc, "1", "u1", "x2") - gamma * two_form(rc, "1", "x1", "u2");
        const auto theta =
            two_form(rc, "1", "u1", "x2") + two_form(rc, "1", "x1", "u2") + gamma * two_form(rc, "1", "x1", "x2");
        Report r;
        r.subject = "Euler pair reduction";
        add_residual(r, "omega_c = a dx1^dx2 - du1^du2 - gamma (du1^dx2 + dx1^du2)", 1e-12, rp.omega_c - omega, pts4);
        add_residual(r, "theta_c = du1^dx2 + dx1^du2 + gamma dx1^dx2", 1e-12, rp.theta_c - theta, pts4);
        o.reports.push_back(std::move(r));
        const auto sh = red::verify_change_variables_64(rp, gamma, pts4);
        o.reports.push_back(sh.report);
        o.extra["moment"] = rp.action.moment.render();
        o.extra["omega_c"] = rp.omega_c.render();
        o.extra["theta_c"] = rp.theta_c.render();
        o.extra["omega0"] = sh.omega0.render();
        return o;
    }
    if (action == "burgers") {
        o.reports.push_back(red::burgers_decomposition(expr::parse(a_src, ma6::phase_chart()), pts6));
        return o;
    }
    throw InputError("unknown action '" + action + "'");
}

Outcome cmd_burgers(const Config& cfg, double gamma, const std::string& psi_src, const std::string& dp_src, double c) {
    const Chart& plane = fluids::plane_chart();
    const auto psi = expr::parse(psi_src, plane);
    const auto a = 0.5 * expr::parse(dp_src, plane);
    Outcome o;
    o.reports.push_back(fluids::prop5_verify(gamma, psi, c, a, samples(cfg, 3)));
    o.extra["extended_stream"] = fluids::extended_stream(psi, gamma).render();
    return o;
}

Outcome cmd_curvature(const Config& cfg, const std::string& metric, const std::string& a_src,
                      const std::string& require) {
    if (require != "ricci" && require != "flat" && require != "none")
        throw InputError("--require must be ricci, flat or none");
    const auto s = catalog6(metric, a_src);
    auto r = curv::curvature_report(ma6::lr_metric6(s.omega(), s.big_omega()), samples(cfg, 6));
    // Checks that are not required stay visible through the verdicts in details.
    std::erase_if(r.checks, [&](const Check& c) {
        return require == "none" || (require == "ricci" && c.name == "Riemann = 0");
    });
    Outcome o;
    o.reports.push_back(std::move(r));
    o.extra["metric"] = metric;
    return o;
}

Outcome cmd_grid(const std::string& input, const std::string& u_src, const std::string& axes_src,
                 const std::string& p_src, const std::string& write, bool full) {
    fluids::GridField g;
    if (!input.empty()) {
        if (!u_src.empty()) throw InputError("give either --input or --u, not both");
        g = fluids::grid_load(input);
    } else {
        if (u_src.empty() || axes_src.empty()) throw InputError("give --input, or --u with --axes");
        const auto comps = split(u_src, ';');
        if (comps.size() != 2 && comps.size() != 3) throw InputError("--u needs two or three ';'-separated components");
        const Chart& c = comps.size() == 2 ? fluids::plane_chart() : ma6::space_chart();
        const auto u = ext::VectorField::from_strings(c, comps);
        std::vector<fluids::Axis> axes;
        for (const auto& a : split(axes_src, ',')) axes.push_back(fluids::parse_axis(a));
        std::optional<ScalarField> p;
        if (!p_src.empty()) p = expr::parse(p_src, c);
        g = fluids::grid_sample(u, axes, p ? &*p : nullptr);
    }
    if (!write.empty()) {
        std::ofstream f(write);
        if (!f) throw InputError("cannot write " + write);
        fluids::grid_write(f, g);
    }
    const auto an = fluids::grid_analyze(g);
    Outcome o;
    o.reports.push_back(an.report);
    auto j = an.to_json(full);
    for (const char* k : {"subject", "verdict", "residuals", "per_check"}) j.erase(k);
    o.extra = j;
    o.extra["shape"] = g.shape;
    o.extra["spacing"] = g.spacing;
    return o;
}

// ---------------------------------------------------------------- selftest

struct Vector {
    std::string name;
    std::function<Report()> run;
};

Report single(const std::string& subject, const std::string& name, double tol,
              const std::function<double(const Point&)>& residual, const std::vector<Point>& pts) {
    Report r;
    r.subject = subject;
    auto& c = r.add(name, tol);
    for (const auto& p : pts) c.observe(residual(p), p);
    return r;
}

std::vector<Vector> selftest_vectors(const Config& cfg, bool inject_fault) {
    const auto p4 = samples(cfg, 4);
    const auto p6 = samples(cfg, 6);
    const auto p3 = samples(cfg, 3);
    std::vector<Vector> v;
    v.push_back({"pfaffians of the Euler structure", [=] {
                     const auto a = expr::parse("1 + x1^2", ma4::euler_chart());
                     return pfaffian_report(ma4::euler2d(a), a, p4, inject_fault ? -1.0 : 1.0);
                 }});
    for (const char* a : {"1", "-2"})
        v.push_back({std::string("triple relations, a = ") + a, [=] {
                         const auto s = ma4::euler2d(a);
                         return ma4::check_triple(ma4::build_triple(s, p4), p4);
                     }});
    v.push_back({"LR metric pulls back to twice the Hessian", [=] {
                     const auto psi = expr::parse("x1^2 + x1*x2 - x2^2/2", fluids::plane_chart());
                     const auto a = psi.derivative({0, 0}) * psi.derivative({1, 1}) -
                                    psi.derivative({0, 1}) * psi.derivative({0, 1});
                     return ma4::verify_generalized_solution(ma4::euler2d(lift(a, ma4::euler_chart())), psi,
                                                             samples(cfg, 2));
                 }});
    v.push_back({"Hitchin pfaffian and tensor of varpi", [=] {
                     const auto s = ma6::burgers_cy("x1^2 - x2");
                     const auto k = ma6::hitchin_tensor(s.omega());
                     const auto lambda = ma6::hitchin_pfaffian(s.omega(), p6);
                     Report r = single("Hitchin tensor", "lambda(varpi) = 1", 1e-12,
                                       [&](const Point& p) { return lambda.evaluate(p) - 1.0; }, p6);
                     auto& ck = r.add("K_varpi matches the displayed matrix", 1e-12);
                     for (const auto& p : p6) {
                         Eigen::MatrixXd e = Eigen::MatrixXd::Identity(6, 6);
                         e(0, 0) = e(1, 1) = e(5, 5) = -1;
                         e(5, 2) = 2 * (p[0] * p[0] - p[1]);
                         ck.observe((k.evaluate(p) - e).cwiseAbs().maxCoeff(), p);
                     }
                     return r;
                 }});
    v.push_back({"Hitchin dual of varpi", [=] {
                     const auto s = ma6::burgers_cy("x1^2 - x2");
                     const auto hat = ma6::hitchin_dual(s.omega(), p6);
                     const Chart& c = ma6::phase_chart();
                     Report r;
                     r.subject = "Hitchin dual";
                     add_residual(r, "varpi + hat = 2 dxi1^dxi2^dx3", 1e-12,
                                  s.omega() + hat - DifferentialForm::from_terms(c, 3, {{"2", {"xi1", "xi2", "x3"}}}),
                                  p6);
                     add_residual(r, "varpi - hat = 2 dx1^dx2^dxi3 - 2a dx1^dx2^dx3", 1e-12,
                                  s.omega() - hat -
                                      DifferentialForm::from_terms(
                                          c, 3, {{"2", {"x1", "x2", "xi3"}}, {"-2*(x1^2 - x2)", {"x1", "x2", "x3"}}}),
                                  p6);
                     return r;
                 }});
    v.push_back({"Euler pair relations", [=] { return ma6::euler_pair_relations(ma6::euler3d_pair("x1*x2 + 1"), p6); }});
    v.push_back({"Laplace reduction", [=] { return cmd_reduce(cfg, "laplace3d", "1", 0, 0).reports.front(); }});
    v.push_back({"reduced Euler forms and change of variables", [=] {
                     auto o = cmd_reduce(cfg, "euler-pair", "sin(x1)*cos(x2)", 1.0, 0.0);
                     Report r = o.reports[0];
                     for (const auto& c : o.reports[1].checks) r.checks.push_back(c);
                     return r;
                 }});
    v.push_back({"Burgers decomposition", [=] {
                     return red::burgers_decomposition(expr::parse("1 + x1^2", ma6::phase_chart()), p6);
                 }});
    v.push_back({"LR metric of varpi is Ricci-flat", [=] {
                     const auto s = ma6::burgers_cy("x1^2 + x2^2");
                     auto r = curv::curvature_report(ma6::lr_metric6(s.omega(), s.big_omega()), p6);
                     std::erase_if(r.checks, [](const Check& c) { return c.name == "Riemann = 0"; });
                     return r;
                 }});
    v.push_back({"LR metric of varpi is flat for affine a", [=] {
                     const auto s = ma6::burgers_cy("2*x1 + 3*x2 + 1");
                     return curv::curvature_report(ma6::lr_metric6(s.omega(), s.big_omega()), p6);
                 }});
    v.push_back({"LR metric of varpi is not flat for a = x1^2", [=] {
                     const auto s = ma6::burgers_cy("x1^2");
                     const auto f = curv::flatness_verdict(ma6::lr_metric6(s.omega(), s.big_omega()), p6);
                     Report r;
                     r.subject = "curvature";
                     auto& c = r.add("Riemann witness is nonzero", 1e-9);
                     c.residual = f.flat ? 1.0 : 0.0;
                     c.argmax = f.witness;
                     c.note = "residual 1 when no witness is found";
                     return r;
                 }});
    v.push_back({"stream function pipeline, gamma = 2", [=] {
                     return fluids::prop5_verify(2.0, expr::parse("x1^2 + x2^2", fluids::plane_chart()), 0.0,
                                                 expr::parse("1", fluids::plane_chart()), p3);
                 }});
    return v;
}

Outcome cmd_selftest(const Config& cfg, bool inject_fault) {
    Outcome o;
    json list = json::array();
    for (const auto& vec : selftest_vectors(cfg, inject_fault)) {
        Report r;
        try {
            r = vec.run();
        } catch (const std::exception& e) {
            r = Report{};
            auto& c = r.add("completed", 1.0);
            c.residual = INFINITY;
            c.note = e.what();
        }
        r.subject = vec.name;
        list.push_back({{"name", vec.name}, {"pass", r.pass()}});
        o.reports.push_back(std::move(r));
    }
    o.extra["vectors"] = list;
    return o;
}

// ---------------------------------------------------------------- output

json envelope(const std::string& command, const Config& cfg) {
    return {{"report_version", kReportVersion}, {"command", command}, {"seed", cfg.seed}, {"samples", cfg.samples}};
}

void print_human(std::ostream& out, const std::string& command, const Config& cfg, const Outcome& o, bool pass) {
    out << command << ": " << (pass ? "PASS" : "FAIL") << " (seed " << cfg.seed << ", " << cfg.samples
        << " samples)\n";
    for (const auto& r : o.reports) {
        if (r.checks.empty()) continue;
        out << "  " << r.subject << ": " << (r.pass() ? "pass" : "fail") << "\n";
        for (const auto& c : r.checks) {
            out << "    [" << (c.pass() ? "pass" : "FAIL") << "] " << c.name << "  residual " << c.residual << "  tol "
                << c.tolerance << "\n";
            if (!c.note.empty()) out << "           " << c.note << "\n";
        }
        if (!r.details.empty()) out << "    details: " << r.details.dump() << "\n";
    }
    for (const auto& [k, v] : o.extra.items()) {
        if (k == "nodes") continue;
        out << "  " << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
}

int emit_error(std::ostream& out, std::ostream& err, const Config& cfg, const std::string& command,
               const std::string& stage, const std::string& message, std::optional<std::size_t> offset, int code) {
    if (cfg.json) {
        auto j = envelope(command, cfg);
        j["verdict"] = "error";
        j["error"] = {{"stage", stage}, {"message", message}};
        if (offset) j["error"]["offset"] = *offset;
        out << j.dump(2) << "\n";
    } else {
        err << "error (" << stage << "): " << message << "\n";
    }
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config cfg;
    if (const char* env = std::getenv("MAS_SEED")) {
        try {
            cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
            err << "error (arguments): MAS_SEED is not an unsigned integer\n";
            return 2;
        }
    }

    CLI::App app{"Monge-Ampere structure verification"};
    app.name("mas");
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", cfg.seed, "random seed (default 42, or MAS_SEED)");
    app.add_option("--samples", cfg.samples, "number of sample points")->check(CLI::PositiveNumber);
    app.add_flag("--json", cfg.json, "emit a JSON report");
    app.add_option("--tol", cfg.tol, "override every check tolerance")->check(CLI::PositiveNumber);
    app.add_option("--output", cfg.output, "write the report to this file");

    auto* selftest = app.add_subcommand("selftest", "run the built-in identity checks");
    bool inject = false;
    selftest->add_flag("--inject-fault", inject, "flip a sign in the first fixture");

    std::string psi, a = "1", at, grid, structure, action, dp, metric = "burgers-cy", require = "ricci";
    std::string input, u_src, axes, p_src, write;
    double gamma = 0.0, c = 0.0;
    bool emit = false, integrability = false, full = false;

    auto* classify = app.add_subcommand("classify", "classify the Euler structure pointwise");
    std::string a_classify;
    classify->add_option("--psi", psi, "stream function over (x1, x2)");
    classify->add_option("--a", a_classify, "a = lap p / 2 over (x1, x2)");
    classify->add_option("--at", at, "point x1,x2");
    classify->add_option("--grid", grid, "min:max:n,min:max:n");

    auto* triple = app.add_subcommand("triple", "hypersymplectic triple of the Euler structure");
    triple->add_option("--a", a, "a over (x1, x2, u1, u2)");

    auto* hitchin = app.add_subcommand("hitchin", "Hitchin invariants of a catalog structure");
    hitchin->add_option("--structure", structure, "hess1, speciallag, burgers-cy or euler3d-pair")->required();
    hitchin->add_option("--a", a, "a for burgers-cy and euler3d-pair");
    hitchin->add_flag("--emit", emit, "include the forms in catalog JSON");
    hitchin->add_flag("--integrability", integrability, "also check closure and flatness");

    auto* reduce = app.add_subcommand("reduce", "reduction along a translation");
    reduce->add_option("--action", action, "laplace3d, euler-pair or burgers")->required();
    reduce->add_option("--a", a, "a for euler-pair and burgers");
    reduce->add_option("--gamma", gamma, "strain rate for euler-pair");
    reduce->add_option("--c", c, "moment level");

    auto* burgers = app.add_subcommand("burgers", "Burgers flow from a stream function");
    burgers->add_option("--gamma", gamma, "strain rate")->required();
    burgers->add_option("--psi", psi, "stream function over (x1, x2)")->required();
    burgers->add_option("--dp", dp, "lap p over (x1, x2)")->required();
    burgers->add_option("--c", c, "axial offset");

    auto* curvature = app.add_subcommand("curvature", "curvature of an LR metric");
    curvature->add_option("--metric", metric, "burgers-cy, hess1 or speciallag");
    curvature->add_option("--a", a, "a for burgers-cy");
    curvature->add_option("--require", require, "ricci (default), flat or none");

    auto* gridc = app.add_subcommand("grid", "finite-difference diagnostics of gridded velocity");
    gridc->add_option("--input", input, "CSV file");
    gridc->add_option("--u", u_src, "velocity components separated by ';'");
    gridc->add_option("--axes", axes, "min:max:n per axis, comma-separated");
    gridc->add_option("--p", p_src, "pressure expression");
    gridc->add_option("--write", write, "write the sampled grid as CSV");
    gridc->add_flag("--full", full, "include per-node values");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            if (!app.get_subcommands().empty()) out << app.get_subcommands().front()->help();
            return 0;
        }
        const bool wants_json = std::find(args.begin(), args.end(), "--json") != args.end();
        cfg.json = wants_json;
        return emit_error(out, err, cfg, "", "arguments", e.what(), std::nullopt, 2);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    Outcome o;
    try {
        if (*selftest) o = cmd_selftest(cfg, inject);
        else if (*classify) o = cmd_classify(cfg, psi, a_classify, at, grid);
        else if (*triple) o = cmd_triple(cfg, a);
        else if (*hitchin) o = cmd_hitchin(cfg, structure, a, emit, integrability);
        else if (*reduce) o = cmd_reduce(cfg, action, a, gamma, c);
        else if (*burgers) o = cmd_burgers(cfg, gamma, psi, dp, c);
        else if (*curvature) o = cmd_curvature(cfg, metric, a, require);
        else if (*gridc) o = cmd_grid(input, u_src, axes, p_src, write, full);
    } catch (const expr::ParseError& e) {
        return emit_error(out, err, cfg, command, "parse", e.what(), e.offset(), 2);
    } catch (const expr::DomainError& e) {
        return emit_error(out, err, cfg, command, "domain", e.what(), std::nullopt, 2);
    } catch (const fluids::GridError& e) {
        return emit_error(out, err, cfg, command, "input", e.what(), std::nullopt, 2);
    } catch (const std::invalid_argument& e) {
        return emit_error(out, err, cfg, command, "input", e.what(), std::nullopt, 2);
    } catch (const std::exception& e) {
        return emit_error(out, err, cfg, command, "verification", e.what(), std::nullopt, 1);
    }

    if (cfg.tol)
        for (auto& r : o.reports)
            for (auto& ch : r.checks) ch.tolerance = *cfg.tol;
    bool pass = true;
    for (const auto& r : o.reports) pass = pass && r.pass();

    std::ofstream file;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) return emit_error(out, err, cfg, command, "input", "cannot write " + cfg.output, std::nullopt, 2);
    }
    std::ostream& dst = cfg.output.empty() ? out : file;
    if (cfg.json) {
        auto j = envelope(command, cfg);
        j["verdict"] = pass ? "pass" : "fail";
        json reports = json::array();
        for (const auto& r : o.reports) reports.push_back(r.to_json());
        j["reports"] = reports;
        for (const auto& [k, v] : o.extra.items()) j[k] = v;
        dst << j.dump(2) << "\n";
    } else {
        print_human(dst, command, cfg, o, pass);
    }
    return pass ? 0 : 1;
}

}  // namespace mas::cli
