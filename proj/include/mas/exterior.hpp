#pragma once

// Exterior calculus on a single chart.
//
// A DifferentialForm stores one ScalarField per strictly increasing
// multi-index; absent indices are zero. Bilinear objects follow the matrix
// convention B(X, Y) = X^T B Y in chart order, and the symmetric product
// a.b means a(x)b + b(x)a.

#include "mas/fieldexpr.hpp"

#include <Eigen/Dense>

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mas::ext {

using expr::Chart;
using expr::ScalarField;
using MultiIndex = std::vector<int>;

/// A bilinear form or operator is singular at the requested point.
class DegenerateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DifferentialForm {
  public:
    DifferentialForm() = default;
    /// The zero form of the given degree.
    DifferentialForm(Chart chart, int degree);

    static DifferentialForm function(const ScalarField& f);
    /// d x_{i1} ^ ... ^ d x_{ik}; indices in any order (sign by parity).
    static DifferentialForm basis(const Chart& chart, MultiIndex index);
    /// Sum of coeff * d(names...) terms, coefficients parsed on `chart`.
    static DifferentialForm from_terms(const Chart& chart, int degree,
                                       const std::vector<std::pair<std::string, std::vector<std::string>>>& terms);

    [[nodiscard]] const Chart& chart() const { return chart_; }
    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] const std::map<MultiIndex, ScalarField>& terms() const { return terms_; }
    /// Coefficient of a strictly increasing index (zero field if absent).
    [[nodiscard]] ScalarField coeff(const MultiIndex& sorted) const;
    [[nodiscard]] bool is_structurally_zero() const { return terms_.empty(); }

    /// Adds c * dx_index; the index may be unsorted and is reordered with sign.
    void add_term(MultiIndex index, const ScalarField& c);

    /// Coefficient values at a point, keyed like terms().
    [[nodiscard]] std::map<MultiIndex, double> evaluate(std::span<const double> point) const;
    /// max |coefficient| at a point (0 for the zero form).
    [[nodiscard]] double max_abs(std::span<const double> point) const;
    /// alpha(v1, ..., vk) at a point.
    [[nodiscard]] double apply(std::span<const double> point, const std::vector<Eigen::VectorXd>& vectors) const;
    /// Antisymmetric matrix of a 2-form at a point.
    [[nodiscard]] Eigen::MatrixXd matrix(std::span<const double> point) const;
    /// Value of the single coefficient of a top-degree form.
    [[nodiscard]] ScalarField top_coefficient() const;

    [[nodiscard]] std::string render() const;

    DifferentialForm& operator+=(const DifferentialForm& o);
    DifferentialForm& operator-=(const DifferentialForm& o);

  private:
    Chart chart_;
    int degree_ = 0;
    std::map<MultiIndex, ScalarField> terms_;
};

DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b);
DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b);
DifferentialForm operator-(const DifferentialForm& a);
DifferentialForm operator*(const ScalarField& f, const DifferentialForm& a);
DifferentialForm operator*(double s, const DifferentialForm& a);

class VectorField {
  public:
    VectorField() = default;
    VectorField(Chart chart, std::vector<ScalarField> components);
    static VectorField coordinate(const Chart& chart, std::size_t i);
    static VectorField from_strings(const Chart& chart, const std::vector<std::string>& components);

    [[nodiscard]] const Chart& chart() const { return chart_; }
    [[nodiscard]] const ScalarField& operator[](std::size_t i) const { return comps_.at(i); }
    [[nodiscard]] const std::vector<ScalarField>& components() const { return comps_; }
    [[nodiscard]] Eigen::VectorXd evaluate(std::span<const double> point) const;

  private:
    Chart chart_;
    std::vector<ScalarField> comps_;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator*(const ScalarField& f, const VectorField& v);

/// Type-(1,1) tensor: (A X)^i = A[i][j] X^j.
class OperatorField {
  public:
    OperatorField() = default;
    OperatorField(Chart chart, std::vector<std::vector<ScalarField>> entries);
    static OperatorField identity(const Chart& chart);

    [[nodiscard]] const Chart& chart() const { return chart_; }
    [[nodiscard]] std::size_t dim() const { return entries_.size(); }
    [[nodiscard]] const ScalarField& operator()(std::size_t i, std::size_t j) const { return entries_.at(i).at(j); }
    [[nodiscard]] const std::vector<std::vector<ScalarField>>& entries() const { return entries_; }
    [[nodiscard]] Eigen::MatrixXd evaluate(std::span<const double> point) const;
    [[nodiscard]] VectorField apply(const VectorField& v) const;

  private:
    Chart chart_;
    std::vector<std::vector<ScalarField>> entries_;
};

OperatorField operator*(const OperatorField& a, const OperatorField& b);
OperatorField operator*(const ScalarField& f, const OperatorField& a);
OperatorField operator+(const OperatorField& a, const OperatorField& b);

class SymmetricTensorField {
  public:
    SymmetricTensorField() = default;
    /// Built from the upper triangle of `entries`; the lower triangle is ignored.
    SymmetricTensorField(Chart chart, const std::vector<std::vector<ScalarField>>& entries);

    [[nodiscard]] const Chart& chart() const { return chart_; }
    [[nodiscard]] std::size_t dim() const { return entries_.size(); }
    [[nodiscard]] const ScalarField& operator()(std::size_t i, std::size_t j) const { return entries_.at(i).at(j); }
    [[nodiscard]] const std::vector<std::vector<ScalarField>>& entries() const { return entries_; }
    [[nodiscard]] Eigen::MatrixXd evaluate(std::span<const double> point) const;

  private:
    Chart chart_;
    std::vector<std::vector<ScalarField>> entries_;
};

/// Map from a source chart into a target chart, given by target-coordinate
/// components written over the source chart.
class GraphMap {
  public:
    GraphMap() = default;
    GraphMap(Chart source, Chart target, std::vector<ScalarField> components);
    static GraphMap from_strings(const Chart& source, const Chart& target, const std::vector<std::string>& comps);

    [[nodiscard]] const Chart& source() const { return source_; }
    [[nodiscard]] const Chart& target() const { return target_; }
    [[nodiscard]] const std::vector<ScalarField>& components() const { return comps_; }
    /// J[i][k] = d F_i / d s_k.
    [[nodiscard]] std::vector<std::vector<ScalarField>> jacobian() const;

  private:
    Chart source_;
    Chart target_;
    std::vector<ScalarField> comps_;
};

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
DifferentialForm ext_derivative(const DifferentialForm& a);
DifferentialForm interior_product(const VectorField& x, const DifferentialForm& a);
DifferentialForm lie_derivative(const VectorField& x, const DifferentialForm& a);
DifferentialForm pullback(const GraphMap& f, const DifferentialForm& a);
SymmetricTensorField pullback_symmetric(const GraphMap& f, const SymmetricTensorField& g);

/// Solves w(X, Y) = W(A X, Y) for A, i.e. A = W_mat^-1 w_mat.
OperatorField operator_from_pair(const DifferentialForm& big_omega, const DifferentialForm& omega);

/// Entry matrix of a 2-form: M[i][j] = coefficient of dx_i ^ dx_j, antisymmetric.
std::vector<std::vector<ScalarField>> form_matrix(const DifferentialForm& two_form);
DifferentialForm form_from_matrix(const Chart& chart, const std::vector<std::vector<ScalarField>>& m);

/// Determinant of a square matrix of fields by cofactor expansion.
ScalarField determinant(const std::vector<std::vector<ScalarField>>& m);
/// Symbolic inverse: numeric when every entry is constant, else adjugate / det.
std::vector<std::vector<ScalarField>> inverse(const std::vector<std::vector<ScalarField>>& m);

/// Nondegeneracy of a square matrix: |det| > 1e-12 * scale^n with
/// scale = max |entry| (false for the zero matrix).
bool nondegenerate(const Eigen::MatrixXd& m);

}  // namespace mas::ext
