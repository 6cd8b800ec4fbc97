#pragma once

// Levi-Civita curvature of coordinate metrics, with exact derivatives.

#include "mas/exterior.hpp"
#include "mas/report.hpp"

#include <stdexcept>
#include <vector>

namespace mas::curv {

using ext::SymmetricTensorField;

class SingularMetricError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Dense n^rank array in row-major index order.
class Tensor {
  public:
    Tensor(std::size_t n, int rank);
    [[nodiscard]] std::size_t dim() const { return n_; }
    [[nodiscard]] int rank() const { return rank_; }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) { return v_[(i * n_ + j) * n_ + k]; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return v_[(i * n_ + j) * n_ + k]; }
    double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return v_[((i * n_ + j) * n_ + k) * n_ + l];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return v_[((i * n_ + j) * n_ + k) * n_ + l];
    }
    [[nodiscard]] double max_abs() const;

  private:
    std::size_t n_;
    int rank_;
    std::vector<double> v_;
};

/// Gamma(k, i, j) = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
Tensor christoffel(const SymmetricTensorField& g, const Point& point);
/// R(l, i, j, k) = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik.
Tensor riemann(const SymmetricTensorField& g, const Point& point);
/// Ric_jk = R^i_ijk.
Eigen::MatrixXd ricci(const SymmetricTensorField& g, const Point& point);

struct FlatnessVerdict {
    bool flat = true;
    double riemann_max = 0.0;  // max |R| / scale over the usable samples
    Point witness;             // argmax point
    std::vector<Point> singular;
};

/// Sampled flatness: flat iff max |R| < 1e-9 max(1, max |g|) at every usable
/// sample; points where g is singular are skipped and listed.
FlatnessVerdict flatness_verdict(const SymmetricTensorField& g, const std::vector<Point>& samples);

/// Ricci and Riemann maxima with verdicts and witness points.
Report curvature_report(const SymmetricTensorField& g, const std::vector<Point>& samples);

}  // namespace mas::curv
