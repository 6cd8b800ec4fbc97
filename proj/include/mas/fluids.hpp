#pragma once

// Incompressible flows: velocity gradients, the pressure Poisson right-hand
// side, the vorticity/strain split, stream-function Monge-Ampere residuals,
// Burgers-type flows and gridded-data diagnostics.

#include "mas/exterior.hpp"
#include "mas/report.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mas::fluids {

using ext::VectorField;
using expr::Chart;
using expr::ScalarField;

/// (x1, x2).
const Chart& plane_chart();

/// u1 = -psi_x2, u2 = psi_x1, with psi over plane_chart().
struct Flow2D {
    ScalarField psi;
    VectorField u;
};
Flow2D flow2d(const ScalarField& psi);

/// M_ij = du_i/dx_j at the point; u over two or three coordinates.
Eigen::MatrixXd velocity_gradient(const VectorField& u, const Point& x);

/// -u_ij u_ji = -tr(M^2).
double pressure_rhs(const VectorField& u, const Point& x);

struct WeissSplit {
    Eigen::VectorXd vorticity;  // one entry in 2D, three in 3D
    double strain_sq = 0.0;     // tr(S^2), S the symmetric part of M
    double rhs = 0.0;           // |zeta|^2 / 2 - tr(S^2)
};
WeissSplit weiss_split(const Eigen::MatrixXd& m);
WeissSplit weiss_split(const VectorField& u, const Point& x);

/// psi_11 psi_22 - psi_12^2 - a at the point.
double ma_residual_2d(const ScalarField& psi, const ScalarField& a, const Point& x);

/// psi(x1, x2) - (3/8) gamma^2 x3^2 over (x1, x2, x3).
ScalarField extended_stream(const ScalarField& psi, double gamma);

/// u1 = -(gamma/2) x1 - psi_x2, u2 = -(gamma/2) x2 + psi_x1, u3 = gamma x3 - c,
/// over (x1, x2, x3).
struct BurgersFlow {
    double gamma = 0.0;
    double c = 0.0;
    ScalarField psi;
    VectorField u;
};
BurgersFlow burgers_build(double gamma, const ScalarField& psi, double c);

/// Three stages on points of (x1, x2, x3), with a = lap p / 2 over (x1, x2):
/// (i) det Hess psi = a + 3 gamma^2 / 4, (ii) -u_ij u_ji = 2a for the Burgers
/// flow, (iii) the flow graph is bilagrangian for the Euler pair. Check names
/// carry the stage tag; details name the first failing stage.
Report prop5_verify(double gamma, const ScalarField& psi, double c, const ScalarField& a,
                    const std::vector<Point>& samples);

class GridError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Velocity (and optionally pressure) on a uniform lattice. Samples are
/// stored in row-major order, the last axis varying fastest.
struct GridField {
    int dim = 2;
    std::vector<std::size_t> shape;
    std::vector<double> origin;
    std::vector<double> spacing;
    std::vector<std::vector<double>> u;  // u[i][node]
    std::optional<std::vector<double>> p;

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] Point position(std::size_t node) const;
};

/// Parses CSV with header x1,x2[,x3],u1,u2[,u3][,p]. Throws GridError.
GridField grid_read(std::istream& in);
GridField grid_load(const std::string& path);
void grid_write(std::ostream& out, const GridField& g);

/// Samples u (and p, if valid) on the lattice given by per-axis min, max, n.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 2;
};
/// Parses "min:max:n".
Axis parse_axis(const std::string& spec);
GridField grid_sample(const VectorField& u, const std::vector<Axis>& axes, const ScalarField* p = nullptr);

enum class NodeClass { Elliptic, Hyperbolic, Degenerate };
std::string to_string(NodeClass c);

struct GridNode {
    std::size_t index = 0;
    Point x;
    double div = 0.0;
    Eigen::VectorXd vorticity;
    double strain_sq = 0.0;
    double rhs = 0.0;          // -tr(M^2)
    double weiss_rhs = 0.0;    // |zeta|^2/2 - tr(S^2), reported in 2D only
    std::optional<double> lap_p;
    NodeClass cls = NodeClass::Degenerate;
};

struct GridAnalysis {
    int dim = 2;
    std::size_t total = 0;
    std::size_t missing = 0;  // boundary nodes without a centered stencil
    std::vector<GridNode> nodes;
    double degenerate_tol = 0.0;
    Report report;  // "div u = 0" at interior nodes

    [[nodiscard]] nlohmann::json to_json(bool full) const;
};

/// Fourth-order centered differences at interior nodes.
GridAnalysis grid_analyze(const GridField& g);

}  // namespace mas::fluids
