#pragma once

// Reduction of six-dimensional structures along translation actions.

#include "mas/exterior.hpp"
#include "mas/ma6.hpp"
#include "mas/report.hpp"

#include <stdexcept>
#include <vector>

namespace mas::red {

using ext::DifferentialForm;
using ext::GraphMap;
using ext::VectorField;
using expr::Chart;
using expr::ScalarField;

/// L_X(form) does not vanish on the sample set.
class InvarianceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The moment map is not linear, or the identity checks fail.
class ReductionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// mu with i_X Omega = -d mu, linear and vanishing at the origin. X and
/// Omega must have constant coefficients.
ScalarField moment_map(const DifferentialForm& big_omega, const VectorField& x);

struct TranslationAction {
    VectorField generator;
    double level = 0.0;
    ScalarField moment;
    std::size_t quotient_index = 0;  // coordinate set to 0 on the slice
    std::size_t solved_index = 0;    // coordinate solved from mu = level
    Chart reduced;                   // the remaining four coordinates
    GraphMap slice;                  // reduced chart -> mu^-1(level)
};

/// Translation by constant `generator` components at moment level `level`.
/// The slice sets the first coordinate moved by X to 0 and solves mu = level
/// for another coordinate.
TranslationAction translation_action(const DifferentialForm& big_omega, const std::vector<double>& generator,
                                     double level);

/// Residual of L_X(form) over the samples; pass iff < 1e-10.
Report check_invariance(const DifferentialForm& form, const VectorField& x, const std::vector<Point>& samples);

/// Pullback of i_X(form) along the slice. Throws InvarianceError naming the
/// residual and point when the form is not invariant.
DifferentialForm reduce(const DifferentialForm& form, const TranslationAction& act, const std::vector<Point>& samples);
/// Restriction of Omega to the slice.
DifferentialForm reduced_symplectic(const DifferentialForm& big_omega, const TranslationAction& act);

/// The 3D Laplace structure on the phase chart.
ma6::MAStructure6 laplace3d();

struct ReducedPair {
    DifferentialForm omega_c;
    DifferentialForm theta_c;
    ScalarField a;  // a on the reduced chart
    TranslationAction action;
};

/// Reduction of the Euler pair along d/dx3 + gamma d/du3 at level c.
ReducedPair reduce_euler_pair(const ma6::EulerPair6& pair, double gamma, double c, const std::vector<Point>& samples);

/// (X1, X2, U1, U2).
const Chart& shear_chart();

struct ShearedPair {
    DifferentialForm theta_c;  // pulled back, canonical
    DifferentialForm omega_c;  // pulled back
    DifferentialForm omega0;   // (a + 3 gamma^2 / 4) dX1^dX2 - dU1^dU2
    Report report;
};

/// Pulls the reduced pair back along x1 = X1, x2 = X2, u1 = -U2 - gamma X1/2,
/// u2 = U1 - gamma X2/2 and checks theta_c = dX1^dU1 + dX2^dU2 and
/// omega_c = omega0 - (gamma/2) theta_c on the samples.
ShearedPair verify_change_variables_64(const ReducedPair& pair, double gamma, const std::vector<Point>& samples);
/// As above; throws ReductionError when an identity residual is >= 1e-10.
ShearedPair change_variables_64(const ReducedPair& pair, double gamma, const std::vector<Point>& samples);

/// Splits Omega and varpi along X = d/dx3 and Y = K X for the Burgers
/// structure, and checks the renormalized reduced triple.
Report burgers_decomposition(const ScalarField& a, const std::vector<Point>& samples);

}  // namespace mas::red
