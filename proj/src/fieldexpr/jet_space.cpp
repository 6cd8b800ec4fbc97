#include "jet_space.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mas::expr::detail {

namespace {

std::uint64_t pack(const std::vector<std::uint8_t>& e) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < e.size(); ++i) key |= static_cast<std::uint64_t>(e[i]) << (4 * i);
    return key;
}

void monomials_of_degree(std::size_t nvars, int degree, std::size_t pos, std::vector<std::uint8_t>& cur,
                         std::vector<std::vector<std::uint8_t>>& out) {
    if (pos + 1 == nvars) {
        cur[pos] = static_cast<std::uint8_t>(degree);
        out.push_back(cur);
        return;
    }
    for (int k = degree; k >= 0; --k) {
        cur[pos] = static_cast<std::uint8_t>(k);
        monomials_of_degree(nvars, degree - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

}  // namespace

std::shared_ptr<const JetSpace> JetSpace::get(std::size_t nvars, int order) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, int>, std::shared_ptr<const JetSpace>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{nvars, order}];
    if (!slot) slot = std::make_shared<const JetSpace>(nvars, order);
    return slot;
}

JetSpace::JetSpace(std::size_t nvars, int order) : nvars_(nvars), order_(order) {
    if (order < 0 || order > kMaxInternalOrder)
        throw std::invalid_argument("jet order " + std::to_string(order) + " out of range");
    if (nvars > kMaxJetVars) throw std::invalid_argument("too many jet variables");

    if (nvars == 0) {
        exps_.push_back({});
    } else {
        std::vector<std::uint8_t> cur(nvars, 0);
        for (int d = 0; d <= order; ++d) monomials_of_degree(nvars, d, 0, cur, exps_);
    }
    degree_.reserve(exps_.size());
    weight_.reserve(exps_.size());
    for (std::size_t k = 0; k < exps_.size(); ++k) {
        int deg = 0;
        double w = 1.0;
        for (auto p : exps_[k]) {
            deg += p;
            for (int f = 2; f <= p; ++f) w *= f;
        }
        degree_.push_back(deg);
        weight_.push_back(w);
        lookup_.emplace(pack(exps_[k]), static_cast<long>(k));
    }

    raised_.assign(nvars, std::vector<long>(exps_.size(), -1));
    for (std::size_t v = 0; v < nvars; ++v) {
        for (std::size_t k = 0; k < exps_.size(); ++k) {
            if (degree_[k] >= order) continue;
            auto e = exps_[k];
            ++e[v];
            raised_[v][k] = lookup_.at(pack(e));
        }
    }

    products_.resize(exps_.size());
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        const auto ki = pack(exps_[i]);
        for (std::size_t j = 0; j < exps_.size() && degree_[i] + degree_[j] <= order; ++j) {
            const auto k = lookup_.at(ki + pack(exps_[j]));
            products_[static_cast<std::size_t>(k)].emplace_back(static_cast<std::uint32_t>(i),
                                                                static_cast<std::uint32_t>(j));
        }
    }
}

long JetSpace::index(const std::vector<std::uint8_t>& e) const {
    if (e.size() != nvars_) return -1;
    int deg = 0;
    for (auto p : e) deg += p;
    if (deg > order_) return -1;
    return lookup_.at(pack(e));
}

TaylorJet jet_constant(const std::shared_ptr<const JetSpace>& s, double v) {
    TaylorJet j{s, std::vector<double>(s->size(), 0.0)};
    j.c[0] = v;
    return j;
}

TaylorJet jet_variable(const std::shared_ptr<const JetSpace>& s, std::size_t i, double v) {
    auto j = jet_constant(s, v);
    if (s->order() >= 1) j.c[s->linear(i)] = 1.0;
    return j;
}

TaylorJet jet_add(const TaylorJet& a, const TaylorJet& b) {
    assert(a.space == b.space);
    TaylorJet r{a.space, a.c};
    for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] += b.c[k];
    return r;
}

TaylorJet jet_sub(const TaylorJet& a, const TaylorJet& b) {
    assert(a.space == b.space);
    TaylorJet r{a.space, a.c};
    for (std::size_t k = 0; k < r.c.size(); ++k) r.c[k] -= b.c[k];
    return r;
}

TaylorJet jet_neg(const TaylorJet& a) {
    TaylorJet r{a.space, a.c};
    for (auto& x : r.c) x = -x;
    return r;
}

TaylorJet jet_mul(const TaylorJet& a, const TaylorJet& b) {
    assert(a.space == b.space);
    const auto& s = *a.space;
    TaylorJet r{a.space, std::vector<double>(s.size(), 0.0)};
    for (std::size_t k = 0; k < s.size(); ++k) {
        const auto& prods = s.products(k);
        double acc = a.c[prods[0].first] * b.c[prods[0].second];
        for (std::size_t p = 1; p < prods.size(); ++p) acc += a.c[prods[p].first] * b.c[prods[p].second];
        r.c[k] = acc;
    }
    return r;
}

TaylorJet jet_div(const TaylorJet& a, const TaylorJet& b) {
    assert(a.space == b.space);
    const auto& s = *a.space;
    const double b0 = b.c[0];
    TaylorJet q{a.space, std::vector<double>(s.size(), 0.0)};
    for (std::size_t k = 0; k < s.size(); ++k) {
        double acc = a.c[k];
        for (const auto& [i, j] : s.products(k)) {
            if (j == 0) continue;
            acc -= q.c[i] * b.c[j];
        }
        q.c[k] = acc / b0;
    }
    return q;
}

TaylorJet jet_apply(const TaylorJet& a, const std::vector<double>& derivs) {
    const int order = a.space->order();
    auto result = jet_constant(a.space, derivs[0]);
    if (order == 0) return result;
    TaylorJet h{a.space, a.c};
    h.c[0] = 0.0;
    TaylorJet hp = h;
    double inv_fact = 1.0;
    for (int n = 1; n <= order; ++n) {
        inv_fact /= n;
        const double coef = derivs[static_cast<std::size_t>(n)] * inv_fact;
        if (coef != 0.0)
            for (std::size_t k = 0; k < hp.c.size(); ++k) result.c[k] += coef * hp.c[k];
        if (n < order) hp = jet_mul(hp, h);
    }
    return result;
}

TaylorJet jet_shift(const TaylorJet& a, std::size_t var) {
    const auto& s = *a.space;
    auto out_space = JetSpace::get(s.nvars(), s.order() - 1);
    TaylorJet r{out_space, std::vector<double>(out_space->size(), 0.0)};
    for (std::size_t k = 0; k < out_space->size(); ++k) {
        const long src = s.raised(var, k);
        r.c[k] = a.c[static_cast<std::size_t>(src)] * (out_space->exponents(k)[var] + 1);
    }
    return r;
}

TaylorJet jet_truncate(const TaylorJet& a, int order) {
    if (order == a.space->order()) return a;
    auto out_space = JetSpace::get(a.space->nvars(), order);
    return TaylorJet{out_space, std::vector<double>(a.c.begin(), a.c.begin() + static_cast<long>(out_space->size()))};
}

TaylorJet jet_compose(const TaylorJet& p, const std::vector<TaylorJet>& inputs,
                      const std::shared_ptr<const JetSpace>& out_space) {
    const auto& ps = *p.space;
    const int order = out_space->order();
    auto result = jet_constant(out_space, p.c[0]);
    if (order == 0 || ps.size() == 1) return result;

    // powers[i][n] = (inputs[i] - inputs[i](0))^n
    std::vector<std::vector<TaylorJet>> powers(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        TaylorJet h{out_space, inputs[i].c};
        h.c[0] = 0.0;
        powers[i].push_back(jet_constant(out_space, 1.0));
        powers[i].push_back(h);
        for (int n = 2; n <= ps.order(); ++n) powers[i].push_back(jet_mul(powers[i].back(), h));
    }
    for (std::size_t k = 1; k < ps.size(); ++k) {
        if (p.c[k] == 0.0 || ps.degree(k) > order) continue;
        const auto& e = ps.exponents(k);
        TaylorJet term;
        bool first = true;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (first) {
                term = powers[i][e[i]];
                first = false;
            } else {
                term = jet_mul(term, powers[i][e[i]]);
            }
        }
        for (std::size_t c = 0; c < term.c.size(); ++c) result.c[c] += p.c[k] * term.c[c];
    }
    return result;
}

bool jet_finite(const TaylorJet& a) {
    for (double x : a.c)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace mas::expr::detail
