#pragma once

// Effective 3-forms on six-dimensional phase space: Hitchin tensor and
// pfaffian, Lychagin-Roubtsov metric, Hitchin dual, the example structures
// and the Euler pair (omega, theta).

#include "mas/exterior.hpp"
#include "mas/report.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mas::ma6 {

using ext::DifferentialForm;
using ext::OperatorField;
using ext::SymmetricTensorField;
using ext::VectorField;
using expr::Chart;
using expr::ScalarField;

/// K^2 is not a multiple of the identity at some point.
class NondegeneracyViolation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class StructureError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// (x1, x2, x3, xi1, xi2, xi3).
const Chart& phase_chart();
/// (x1, x2, x3, u1, u2, u3).
const Chart& fluid_chart();
/// (x1, x2, x3).
const Chart& space_chart();

/// sum_i dx_i ^ dp_i with p_i the coordinate i + 3.
DifferentialForm canonical_symplectic(const Chart& c);

class MAStructure6 {
  public:
    /// Checks omega^Omega = 0 on `samples` (residual < 1e-12).
    MAStructure6(DifferentialForm big_omega, DifferentialForm omega, const std::vector<Point>& samples);
    MAStructure6(DifferentialForm big_omega, DifferentialForm omega);

    [[nodiscard]] const Chart& chart() const { return omega_.chart(); }
    [[nodiscard]] const DifferentialForm& big_omega() const { return big_omega_; }
    [[nodiscard]] const DifferentialForm& omega() const { return omega_; }

  private:
    DifferentialForm big_omega_;
    DifferentialForm omega_;
};

/// <alpha, K(X)> = (alpha ^ i_X w ^ w) / vol, vol = dx1^...^dx6 in chart order.
OperatorField hitchin_tensor(const DifferentialForm& omega);

/// lambda = tr(K^2) / 6 as a field.
ScalarField hitchin_pfaffian(const DifferentialForm& omega);
/// As above, and asserts K^2 = lambda Id at every sample (residual below
/// 1e-10 max(1, |K|^2)); throws NondegeneracyViolation otherwise.
ScalarField hitchin_pfaffian(const DifferentialForm& omega, const std::vector<Point>& samples);

/// Points where |lambda| <= 1e-10 (Hitchin-degenerate).
std::vector<Point> hitchin_degenerate_points(const DifferentialForm& omega, const std::vector<Point>& samples);

/// g(X, Y) = -(i_X w ^ i_Y w ^ Omega) / vol / sqrt|lambda|.
SymmetricTensorField lr_metric6(const DifferentialForm& omega, const DifferentialForm& big_omega);

/// A = -sign(lambda) K / sqrt|lambda|; the operator with g(A., .) = Omega.
OperatorField compatibility_operator(const DifferentialForm& omega);

/// Residual of g(A X, Y) - Omega(X, Y) over random X, Y at the samples.
Report lr_compatibility(const DifferentialForm& omega, const DifferentialForm& big_omega,
                        const std::vector<Point>& samples);

/// hat(X, Y, Z) = (w(KX, Y, Z) + w(X, KY, Z) + w(X, Y, KZ)) / (3 sqrt|lambda|).
/// Throws ext::DegenerateError if lambda vanishes at a sample.
DifferentialForm hitchin_dual(const DifferentialForm& omega, const std::vector<Point>& samples);
DifferentialForm hitchin_dual(const DifferentialForm& omega);

/// Derivation action of an operator on a k-form:
/// (K.w)(X1..Xk) = sum_i w(X1, .., K Xi, .., Xk).
DifferentialForm derivation(const OperatorField& k, const DifferentialForm& omega);

struct Signature {
    int positive = 0;
    int negative = 0;
    int zero = 0;
    friend bool operator==(const Signature&, const Signature&) = default;
};
Signature signature(const Eigen::MatrixXd& symmetric);

// Example structures on phase_chart().
MAStructure6 hess1();
MAStructure6 speciallag();
/// varpi = dxi1^dxi2^dx3 - a dx1^dx2^dx3 + dx1^dx2^dxi3, a over phase_chart().
MAStructure6 burgers_cy(const ScalarField& a);
MAStructure6 burgers_cy(const std::string& a);

struct EulerPair6 {
    DifferentialForm omega;
    DifferentialForm theta;
    DifferentialForm big_omega;
    ScalarField a;
};
/// The pair on fluid_chart() with a over fluid_chart().
EulerPair6 euler3d_pair(const ScalarField& a);
EulerPair6 euler3d_pair(const std::string& a);

/// g = Omega(., K .) as a matrix field, i.e. Omega_mat K.
SymmetricTensorField pair_metric(const DifferentialForm& big_omega, const OperatorField& k);

/// The four tensor relations, both metrics and omega^theta = 3 vol.
Report euler_pair_relations(const EulerPair6& p, const std::vector<Point>& samples);

/// Pulls omega and theta back along x -> (x, u(x)); u is written over
/// space_chart(). Details carry div u and -lap p - u_ij u_ji with lap p = 2a.
Report verify_bilagrangian(const EulerPair6& p, const VectorField& u, const std::vector<Point>& samples);

/// Closure of w / |lambda|^(1/4), closure of its dual, and sampled flatness
/// of the LR metric.
Report integrability6(const MAStructure6& s, const std::vector<Point>& samples);

}  // namespace mas::ma6
