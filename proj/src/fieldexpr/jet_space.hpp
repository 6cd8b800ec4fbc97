#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mas::expr::detail {

inline constexpr int kMaxInternalOrder = 8;
inline constexpr std::size_t kMaxJetVars = 16;

/// Monomial bookkeeping for truncated Taylor polynomials in `nvars`
/// variables up to total degree `order`. Monomials are listed by degree,
/// and within a degree lexicographically, so the monomials of a lower-order
/// space are a prefix of those of a higher-order space.
class JetSpace {
  public:
    static std::shared_ptr<const JetSpace> get(std::size_t nvars, int order);

    JetSpace(std::size_t nvars, int order);

    [[nodiscard]] std::size_t nvars() const { return nvars_; }
    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] std::size_t size() const { return exps_.size(); }
    [[nodiscard]] const std::vector<std::uint8_t>& exponents(std::size_t k) const { return exps_[k]; }
    [[nodiscard]] int degree(std::size_t k) const { return degree_[k]; }
    /// Index of a monomial, or -1 if its degree exceeds the order.
    [[nodiscard]] long index(const std::vector<std::uint8_t>& e) const;
    /// Index of the monomial exponents(k) + e_var, or -1 past the order.
    [[nodiscard]] long raised(std::size_t var, std::size_t k) const { return raised_[var][k]; }
    /// Index of the linear monomial x_i.
    [[nodiscard]] std::size_t linear(std::size_t i) const { return 1 + i; }

    /// For each output monomial k, the pairs (i, j) with e_i + e_j = e_k.
    [[nodiscard]] const std::vector<std::pair<std::uint32_t, std::uint32_t>>& products(std::size_t k) const {
        return products_[k];
    }
    /// Multiplicity factor e! used to convert Taylor coefficients to partials.
    [[nodiscard]] double factorial_weight(std::size_t k) const { return weight_[k]; }

  private:
    std::size_t nvars_;
    int order_;
    std::vector<std::vector<std::uint8_t>> exps_;
    std::vector<int> degree_;
    std::vector<double> weight_;
    std::vector<std::vector<long>> raised_;
    std::unordered_map<std::uint64_t, long> lookup_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> products_;
};

/// Truncated Taylor polynomial; coefficient k multiplies the monomial
/// exponents(k) (not the partial derivative).
struct TaylorJet {
    std::shared_ptr<const JetSpace> space;
    std::vector<double> c;

    [[nodiscard]] double value() const { return c.front(); }
};

TaylorJet jet_constant(const std::shared_ptr<const JetSpace>& s, double v);
TaylorJet jet_variable(const std::shared_ptr<const JetSpace>& s, std::size_t i, double v);
TaylorJet jet_add(const TaylorJet& a, const TaylorJet& b);
TaylorJet jet_sub(const TaylorJet& a, const TaylorJet& b);
TaylorJet jet_neg(const TaylorJet& a);
TaylorJet jet_mul(const TaylorJet& a, const TaylorJet& b);
/// Caller guarantees b.value() != 0.
TaylorJet jet_div(const TaylorJet& a, const TaylorJet& b);
/// f(a) from the derivatives f^(n)(a0), n = 0..order.
TaylorJet jet_apply(const TaylorJet& a, const std::vector<double>& derivs);
/// d/dx_var, result in the space of order-1.
TaylorJet jet_shift(const TaylorJet& a, std::size_t var);
TaylorJet jet_truncate(const TaylorJet& a, int order);
/// Evaluate polynomial p (in p.space variables) at the jets `inputs`, each
/// having zero constant term after subtracting `at`.
TaylorJet jet_compose(const TaylorJet& p, const std::vector<TaylorJet>& inputs,
                      const std::shared_ptr<const JetSpace>& out_space);
bool jet_finite(const TaylorJet& a);

}  // namespace mas::expr::detail
