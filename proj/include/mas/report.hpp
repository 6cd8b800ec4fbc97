#pragma once

// Pointwise verification reports.

#include "mas/sampling.hpp"

#include <json.hpp>

#include <cmath>
#include <deque>
#include <string>
#include <vector>

namespace mas {

/// One named check: the largest residual seen over a sample set and where.
struct Check {
    std::string name;
    double tolerance = 0.0;
    double residual = 0.0;
    Point argmax;
    std::string note;

    Check() = default;
    Check(std::string n, double tol) : name(std::move(n)), tolerance(tol) {}

    void observe(double r, const Point& at) {
        const double a = std::isnan(r) ? INFINITY : std::fabs(r);
        if (argmax.empty() || a > residual) {
            residual = a;
            argmax = at;
        }
    }
    [[nodiscard]] bool pass() const { return residual < tolerance; }
};

struct Report {
    std::string subject;
    std::deque<Check> checks;  // stable references across add()
    nlohmann::json details = nlohmann::json::object();

    Check& add(std::string name, double tol) { return checks.emplace_back(std::move(name), tol); }
    [[nodiscard]] bool pass() const {
        for (const auto& c : checks)
            if (!c.pass()) return false;
        return true;
    }
    [[nodiscard]] const Check* worst() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

inline const Check* Report::worst() const {
    const Check* w = nullptr;
    for (const auto& c : checks)
        if (!w || c.residual / c.tolerance > w->residual / w->tolerance) w = &c;
    return w;
}

inline nlohmann::json Report::to_json() const {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json j{{"name", c.name},
                         {"pass", c.pass()},
                         {"residual", c.residual},
                         {"tolerance", c.tolerance},
                         {"argmax_point", c.argmax}};
        if (!c.note.empty()) j["note"] = c.note;
        per.push_back(std::move(j));
    }
    nlohmann::json residuals{{"max", 0.0}, {"argmax_point", nlohmann::json::array()}};
    double mx = -1;
    for (const auto& c : checks)
        if (c.residual > mx) {
            mx = c.residual;
            residuals = {{"max", c.residual}, {"argmax_point", c.argmax}};
        }
    nlohmann::json out{{"subject", subject},
                       {"verdict", pass() ? "pass" : "fail"},
                       {"residuals", residuals},
                       {"per_check", per}};
    if (!details.empty()) out["details"] = details;
    return out;
}

}  // namespace mas
