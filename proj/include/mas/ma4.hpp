#pragma once

// Monge-Ampere structures on the four-dimensional phase space.

#include "mas/exterior.hpp"
#include "mas/report.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mas::ma4 {

using ext::DifferentialForm;
using ext::OperatorField;
using ext::SymmetricTensorField;
using expr::Chart;
using expr::ScalarField;

/// Raised when a pair (Omega, omega) is not a Monge-Ampere structure.
class StructureError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class MAStructure4 {
  public:
    /// Checks dOmega = 0, Omega^Omega != 0 and omega^Omega = 0 on `samples`.
    MAStructure4(DifferentialForm big_omega, DifferentialForm omega, const std::vector<Point>& samples);
    MAStructure4(DifferentialForm big_omega, DifferentialForm omega);

    [[nodiscard]] const Chart& chart() const { return omega_.chart(); }
    [[nodiscard]] const DifferentialForm& big_omega() const { return big_omega_; }
    [[nodiscard]] const DifferentialForm& omega() const { return omega_; }

  private:
    DifferentialForm big_omega_;
    DifferentialForm omega_;
};

/// The chart (x1, x2, u1, u2).
const Chart& euler_chart();
/// Omega = dx1^du2 + du1^dx2, omega = du1^du2 - a dx1^dx2 with a over euler_chart().
MAStructure4 euler2d(const ScalarField& a);
MAStructure4 euler2d(const std::string& a);

/// pf with omega^omega = pf Omega^Omega.
ScalarField pfaffian(const MAStructure4& s);
ScalarField pfaffian(const DifferentialForm& big_omega, const DifferentialForm& omega);

enum class Type { Elliptic, Hyperbolic, Degenerate };
const char* to_string(Type t);
Type classify(const MAStructure4& s, const Point& point);

/// A with omega(.,.) = Omega(A.,.); normalized divides by sqrt|pf|.
OperatorField structure_tensor(const MAStructure4& s, bool normalized);

/// g(X,Y) = 2 (i_X w ^ i_Y W + i_Y w ^ i_X W) ^ dx1 ^ dx2 / (W ^ W).
SymmetricTensorField lr_metric(const MAStructure4& s);

/// hat-omega(X, Y) = g(X, A Y).
DifferentialForm dual_form(const MAStructure4& s);

struct HypersymplecticTriple {
    DifferentialForm omega_tilde;
    DifferentialForm omega;
    DifferentialForm omega_hat;
    OperatorField s;  // hat = omega(S.,.)
    OperatorField i;  // omega = tilde(I.,.)
    OperatorField t;  // hat = tilde(T.,.)
    int epsilon = 0;  // sign of pf on the sample set
};

/// Throws ext::DegenerateError naming the point where pf vanishes, or where
/// it changes sign across the sample set.
HypersymplecticTriple build_triple(const MAStructure4& s, const std::vector<Point>& samples);
/// Residuals of the six wedge identities and the nine operator relations.
Report check_triple(const HypersymplecticTriple& t, const std::vector<Point>& samples);

/// Closure of omega / sqrt|pf| over the samples (integrable iff < 1e-9).
Report integrability(const MAStructure4& s, const std::vector<Point>& samples);

/// Pulls Omega and omega back along (x1, x2) -> (x1, x2, -psi_x2, psi_x1) and
/// reports the induced metric identities.
Report verify_generalized_solution(const MAStructure4& s, const ScalarField& psi, const std::vector<Point>& samples);

/// The graph (x1, x2) -> (x1, x2, -psi_x2, psi_x1) into the chart of s.
ext::GraphMap stream_graph(const Chart& target, const ScalarField& psi);

/// Counts of positive, negative and (|ev| <= 1e-10 scale) zero eigenvalues.
struct Signature {
    int positive = 0;
    int negative = 0;
    int zero = 0;
    friend bool operator==(const Signature&, const Signature&) = default;
};
Signature signature(const Eigen::MatrixXd& symmetric);

}  // namespace mas::ma4
