#include "mas/exterior.hpp"

#include <algorithm>
#include <cmath>

namespace mas::ext {

namespace {

void require_same(const Chart& a, const Chart& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": chart mismatch");
}

// Sorts in place; returns the permutation sign, or 0 for a repeated index.
int sort_with_sign(MultiIndex& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
        for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
            if (idx[j - 1] == idx[j]) return 0;
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    return sign;
}

ScalarField zero(const Chart& c) { return ScalarField::constant(c, 0.0); }

// Accumulates a sum of products, skipping structural zeros.
void accumulate(ScalarField& acc, const ScalarField& a, const ScalarField& b) {
    if (a.is_zero() || b.is_zero()) return;
    acc = acc + a * b;
}

std::vector<MultiIndex> increasing_subsets(int n, int k) {
    std::vector<MultiIndex> out;
    MultiIndex cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i < n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

using FieldMatrix = std::vector<std::vector<ScalarField>>;

FieldMatrix submatrix(const FieldMatrix& m, const MultiIndex& rows, const MultiIndex& cols) {
    FieldMatrix s(rows.size(), std::vector<ScalarField>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) s[i][j] = m[rows[i]][cols[j]];
    return s;
}

}  // namespace

// ---------------------------------------------------------------- forms

DifferentialForm::DifferentialForm(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
    if (degree < 0 || static_cast<std::size_t>(degree) > chart_.dim())
        throw std::invalid_argument("form degree out of range for chart");
}

DifferentialForm DifferentialForm::function(const ScalarField& f) {
    DifferentialForm r(f.chart(), 0);
    r.add_term({}, f);
    return r;
}

DifferentialForm DifferentialForm::basis(const Chart& chart, MultiIndex index) {
    DifferentialForm r(chart, static_cast<int>(index.size()));
    r.add_term(std::move(index), ScalarField::constant(chart, 1.0));
    return r;
}

DifferentialForm DifferentialForm::from_terms(
    const Chart& chart, int degree, const std::vector<std::pair<std::string, std::vector<std::string>>>& terms) {
    DifferentialForm r(chart, degree);
    for (const auto& [coeff, names] : terms) {
        MultiIndex idx;
        for (const auto& n : names) idx.push_back(static_cast<int>(chart.require(n)));
        r.add_term(std::move(idx), expr::parse(coeff, chart));
    }
    return r;
}

ScalarField DifferentialForm::coeff(const MultiIndex& sorted) const {
    auto it = terms_.find(sorted);
    return it == terms_.end() ? zero(chart_) : it->second;
}

void DifferentialForm::add_term(MultiIndex index, const ScalarField& c) {
    if (static_cast<int>(index.size()) != degree_) throw std::invalid_argument("add_term: index length != degree");
    for (int i : index)
        if (i < 0 || static_cast<std::size_t>(i) >= chart_.dim())
            throw std::out_of_range("add_term: index outside chart");
    require_same(chart_, c.chart(), "add_term");
    const int sign = sort_with_sign(index);
    if (sign == 0 || c.is_zero()) return;
    auto it = terms_.find(index);
    if (it == terms_.end()) {
        terms_.emplace(std::move(index), sign > 0 ? c : -c);
        return;
    }
    it->second = sign > 0 ? it->second + c : it->second - c;
    if (it->second.is_zero()) terms_.erase(it);
}

std::map<MultiIndex, double> DifferentialForm::evaluate(std::span<const double> point) const {
    std::map<MultiIndex, double> out;
    for (const auto& [idx, c] : terms_) out.emplace(idx, c.evaluate(point));
    return out;
}

double DifferentialForm::max_abs(std::span<const double> point) const {
    double m = 0.0;
    for (const auto& [idx, c] : terms_) m = std::max(m, std::fabs(c.evaluate(point)));
    return m;
}

double DifferentialForm::apply(std::span<const double> point, const std::vector<Eigen::VectorXd>& vectors) const {
    if (static_cast<int>(vectors.size()) != degree_) throw std::invalid_argument("apply: need degree vectors");
    double sum = 0.0;
    for (const auto& [idx, c] : terms_) {
        Eigen::MatrixXd m(degree_, degree_);
        for (int r = 0; r < degree_; ++r)
            for (int s = 0; s < degree_; ++s) m(r, s) = vectors[s](idx[r]);
        sum += c.evaluate(point) * (degree_ == 0 ? 1.0 : m.determinant());
    }
    return sum;
}

Eigen::MatrixXd DifferentialForm::matrix(std::span<const double> point) const {
    if (degree_ != 2) throw std::invalid_argument("matrix: not a 2-form");
    const auto n = static_cast<Eigen::Index>(chart_.dim());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [idx, c] : terms_) {
        const double v = c.evaluate(point);
        m(idx[0], idx[1]) = v;
        m(idx[1], idx[0]) = -v;
    }
    return m;
}

ScalarField DifferentialForm::top_coefficient() const {
    if (static_cast<std::size_t>(degree_) != chart_.dim()) throw std::invalid_argument("not a top-degree form");
    MultiIndex all(chart_.dim());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return coeff(all);
}

std::string DifferentialForm::render() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [idx, c] : terms_) {
        if (!out.empty()) out += " + ";
        out += c.render();
        for (std::size_t k = 0; k < idx.size(); ++k) {
            out += k == 0 ? "*" : "^";
            out += "d" + chart_.name(static_cast<std::size_t>(idx[k]));
        }
    }
    return out;
}

DifferentialForm& DifferentialForm::operator+=(const DifferentialForm& o) {
    require_same(chart_, o.chart_, "form sum");
    if (degree_ != o.degree_) throw std::invalid_argument("form sum: degree mismatch");
    for (const auto& [idx, c] : o.terms_) add_term(idx, c);
    return *this;
}

DifferentialForm& DifferentialForm::operator-=(const DifferentialForm& o) {
    require_same(chart_, o.chart_, "form difference");
    if (degree_ != o.degree_) throw std::invalid_argument("form difference: degree mismatch");
    for (const auto& [idx, c] : o.terms_) add_term(idx, -c);
    return *this;
}

DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b) { return a -= b; }
DifferentialForm operator-(const DifferentialForm& a) { return -1.0 * a; }

DifferentialForm operator*(const ScalarField& f, const DifferentialForm& a) {
    require_same(f.chart(), a.chart(), "scalar multiple");
    DifferentialForm r(a.chart(), a.degree());
    for (const auto& [idx, c] : a.terms()) r.add_term(idx, f * c);
    return r;
}

DifferentialForm operator*(double s, const DifferentialForm& a) {
    return ScalarField::constant(a.chart(), s) * a;
}

// ---------------------------------------------------------------- vectors and tensors

VectorField::VectorField(Chart chart, std::vector<ScalarField> components)
    : chart_(std::move(chart)), comps_(std::move(components)) {
    if (comps_.size() != chart_.dim()) throw std::invalid_argument("vector field: wrong number of components");
    for (const auto& c : comps_) require_same(chart_, c.chart(), "vector field");
}

VectorField VectorField::coordinate(const Chart& chart, std::size_t i) {
    std::vector<ScalarField> c(chart.dim(), zero(chart));
    c.at(i) = ScalarField::constant(chart, 1.0);
    return {chart, std::move(c)};
}

VectorField VectorField::from_strings(const Chart& chart, const std::vector<std::string>& components) {
    std::vector<ScalarField> c;
    for (const auto& s : components) c.push_back(expr::parse(s, chart));
    return {chart, std::move(c)};
}

Eigen::VectorXd VectorField::evaluate(std::span<const double> point) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(comps_.size()));
    for (std::size_t i = 0; i < comps_.size(); ++i) v(static_cast<Eigen::Index>(i)) = comps_[i].evaluate(point);
    return v;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same(a.chart(), b.chart(), "vector sum");
    std::vector<ScalarField> c;
    for (std::size_t i = 0; i < a.components().size(); ++i) c.push_back(a[i] + b[i]);
    return {a.chart(), std::move(c)};
}

VectorField operator*(const ScalarField& f, const VectorField& v) {
    std::vector<ScalarField> c;
    for (const auto& x : v.components()) c.push_back(f * x);
    return {v.chart(), std::move(c)};
}

OperatorField::OperatorField(Chart chart, std::vector<std::vector<ScalarField>> entries)
    : chart_(std::move(chart)), entries_(std::move(entries)) {
    if (entries_.size() != chart_.dim()) throw std::invalid_argument("operator field: wrong shape");
    for (const auto& row : entries_) {
        if (row.size() != chart_.dim()) throw std::invalid_argument("operator field: wrong shape");
        for (const auto& e : row) require_same(chart_, e.chart(), "operator field");
    }
}

OperatorField OperatorField::identity(const Chart& chart) {
    FieldMatrix m(chart.dim(), std::vector<ScalarField>(chart.dim(), zero(chart)));
    for (std::size_t i = 0; i < chart.dim(); ++i) m[i][i] = ScalarField::constant(chart, 1.0);
    return {chart, std::move(m)};
}

Eigen::MatrixXd OperatorField::evaluate(std::span<const double> point) const {
    const auto n = static_cast<Eigen::Index>(entries_.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = entries_[i][j].evaluate(point);
    return m;
}

VectorField OperatorField::apply(const VectorField& v) const {
    require_same(chart_, v.chart(), "operator apply");
    std::vector<ScalarField> c;
    for (std::size_t i = 0; i < dim(); ++i) {
        ScalarField acc = zero(chart_);
        for (std::size_t j = 0; j < dim(); ++j) accumulate(acc, entries_[i][j], v[j]);
        c.push_back(acc);
    }
    return {chart_, std::move(c)};
}

OperatorField operator*(const OperatorField& a, const OperatorField& b) {
    require_same(a.chart(), b.chart(), "operator product");
    const std::size_t n = a.dim();
    FieldMatrix m(n, std::vector<ScalarField>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ScalarField acc = zero(a.chart());
            for (std::size_t k = 0; k < n; ++k) accumulate(acc, a(i, k), b(k, j));
            m[i][j] = acc;
        }
    return {a.chart(), std::move(m)};
}

OperatorField operator*(const ScalarField& f, const OperatorField& a) {
    FieldMatrix m = a.entries();
    for (auto& row : m)
        for (auto& e : row) e = f * e;
    return {a.chart(), std::move(m)};
}

OperatorField operator+(const OperatorField& a, const OperatorField& b) {
    require_same(a.chart(), b.chart(), "operator sum");
    FieldMatrix m = a.entries();
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) m[i][j] = m[i][j] + b(i, j);
    return {a.chart(), std::move(m)};
}

SymmetricTensorField::SymmetricTensorField(Chart chart, const std::vector<std::vector<ScalarField>>& entries)
    : chart_(std::move(chart)) {
    const std::size_t n = chart_.dim();
    if (entries.size() != n) throw std::invalid_argument("symmetric tensor: wrong shape");
    entries_.assign(n, std::vector<ScalarField>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (entries[i].size() != n) throw std::invalid_argument("symmetric tensor: wrong shape");
        for (std::size_t j = i; j < n; ++j) {
            require_same(chart_, entries[i][j].chart(), "symmetric tensor");
            entries_[i][j] = entries[i][j];
            entries_[j][i] = entries[i][j];
        }
    }
}

Eigen::MatrixXd SymmetricTensorField::evaluate(std::span<const double> point) const {
    const auto n = static_cast<Eigen::Index>(entries_.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) m(i, j) = m(j, i) = entries_[i][j].evaluate(point);
    return m;
}

GraphMap::GraphMap(Chart source, Chart target, std::vector<ScalarField> components)
    : source_(std::move(source)), target_(std::move(target)), comps_(std::move(components)) {
    if (comps_.size() != target_.dim()) throw std::invalid_argument("map: need one component per target coordinate");
    if (source_.dim() > target_.dim()) throw std::invalid_argument("map: source dimension exceeds target");
    for (const auto& c : comps_) require_same(source_, c.chart(), "map component");
}

GraphMap GraphMap::from_strings(const Chart& source, const Chart& target, const std::vector<std::string>& comps) {
    std::vector<ScalarField> c;
    for (const auto& s : comps) c.push_back(expr::parse(s, source));
    return {source, target, std::move(c)};
}

std::vector<std::vector<ScalarField>> GraphMap::jacobian() const {
    FieldMatrix j(comps_.size(), std::vector<ScalarField>(source_.dim()));
    for (std::size_t i = 0; i < comps_.size(); ++i)
        for (std::size_t k = 0; k < source_.dim(); ++k) j[i][k] = comps_[i].derivative(k);
    return j;
}

// ---------------------------------------------------------------- operations

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    require_same(a.chart(), b.chart(), "wedge");
    if (static_cast<std::size_t>(a.degree() + b.degree()) > a.chart().dim())
        throw std::invalid_argument("wedge: degree exceeds chart dimension");
    DifferentialForm r(a.chart(), a.degree() + b.degree());
    for (const auto& [i, ca] : a.terms())
        for (const auto& [j, cb] : b.terms()) {
            MultiIndex idx = i;
            idx.insert(idx.end(), j.begin(), j.end());
            r.add_term(std::move(idx), ca * cb);
        }
    return r;
}

DifferentialForm ext_derivative(const DifferentialForm& a) {
    if (static_cast<std::size_t>(a.degree()) >= a.chart().dim())
        throw std::invalid_argument("d: degree must be below the chart dimension");
    DifferentialForm r(a.chart(), a.degree() + 1);
    const int n = static_cast<int>(a.chart().dim());
    for (const auto& [idx, c] : a.terms())
        for (int j = 0; j < n; ++j) {
            if (!c.depends_on(static_cast<std::size_t>(j))) continue;
            MultiIndex full{j};
            full.insert(full.end(), idx.begin(), idx.end());
            r.add_term(std::move(full), c.derivative(static_cast<std::size_t>(j)));
        }
    return r;
}

DifferentialForm interior_product(const VectorField& x, const DifferentialForm& a) {
    require_same(x.chart(), a.chart(), "interior product");
    if (a.degree() < 1) throw std::invalid_argument("interior product of a function");
    DifferentialForm r(a.chart(), a.degree() - 1);
    for (const auto& [idx, c] : a.terms())
        for (std::size_t pos = 0; pos < idx.size(); ++pos) {
            const ScalarField& xi = x[static_cast<std::size_t>(idx[pos])];
            if (xi.is_zero()) continue;
            MultiIndex rest = idx;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pos));
            const ScalarField term = xi * c;
            r.add_term(std::move(rest), pos % 2 == 0 ? term : -term);
        }
    return r;
}

DifferentialForm lie_derivative(const VectorField& x, const DifferentialForm& a) {
    require_same(x.chart(), a.chart(), "Lie derivative");
    if (a.degree() == 0) {
        const ScalarField f = a.coeff({});
        ScalarField acc = zero(a.chart());
        for (std::size_t i = 0; i < a.chart().dim(); ++i)
            if (f.depends_on(i)) accumulate(acc, x[i], f.derivative(i));
        return DifferentialForm::function(acc);
    }
    DifferentialForm r = ext_derivative(interior_product(x, a));
    if (static_cast<std::size_t>(a.degree()) < a.chart().dim()) r += interior_product(x, ext_derivative(a));
    return r;
}

DifferentialForm pullback(const GraphMap& f, const DifferentialForm& a) {
    require_same(f.target(), a.chart(), "pullback");
    const int k = a.degree();
    const int m = static_cast<int>(f.source().dim());
    if (k > m) throw std::invalid_argument("pullback: form degree exceeds source dimension");
    DifferentialForm r(f.source(), k);
    if (k == 0) {
        r.add_term({}, a.coeff({}).compose(f.components()));
        return r;
    }
    const auto jac = f.jacobian();
    const auto cols = increasing_subsets(m, k);
    std::map<std::pair<MultiIndex, MultiIndex>, ScalarField> minors;
    for (const auto& [idx, c] : a.terms()) {
        const ScalarField pulled = c.compose(f.components());
        if (pulled.is_zero()) continue;
        for (const auto& col : cols) {
            auto key = std::make_pair(idx, col);
            auto it = minors.find(key);
            if (it == minors.end()) it = minors.emplace(key, determinant(submatrix(jac, idx, col))).first;
            if (it->second.is_zero()) continue;
            r.add_term(col, pulled * it->second);
        }
    }
    return r;
}

SymmetricTensorField pullback_symmetric(const GraphMap& f, const SymmetricTensorField& g) {
    require_same(f.target(), g.chart(), "symmetric pullback");
    const auto jac = f.jacobian();
    const std::size_t n = f.target().dim();
    const std::size_t m = f.source().dim();
    FieldMatrix gf(n, std::vector<ScalarField>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) gf[i][j] = gf[j][i] = g(i, j).compose(f.components());
    FieldMatrix h(m, std::vector<ScalarField>(m, zero(f.source())));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            ScalarField acc = zero(f.source());
            for (std::size_t i = 0; i < n; ++i) {
                if (jac[i][a].is_zero()) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (gf[i][j].is_zero() || jac[j][b].is_zero()) continue;
                    acc = acc + jac[i][a] * gf[i][j] * jac[j][b];
                }
            }
            h[a][b] = acc;
        }
    return {f.source(), h};
}

std::vector<std::vector<ScalarField>> form_matrix(const DifferentialForm& two_form) {
    if (two_form.degree() != 2) throw std::invalid_argument("form_matrix: not a 2-form");
    const Chart& c = two_form.chart();
    FieldMatrix m(c.dim(), std::vector<ScalarField>(c.dim(), zero(c)));
    for (const auto& [idx, v] : two_form.terms()) {
        m[idx[0]][idx[1]] = v;
        m[idx[1]][idx[0]] = -v;
    }
    return m;
}

DifferentialForm form_from_matrix(const Chart& chart, const std::vector<std::vector<ScalarField>>& m) {
    DifferentialForm r(chart, 2);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j) r.add_term({static_cast<int>(i), static_cast<int>(j)}, m[i][j]);
    return r;
}

ScalarField determinant(const std::vector<std::vector<ScalarField>>& m) {
    const std::size_t n = m.size();
    if (n == 0) throw std::invalid_argument("determinant of an empty matrix");
    if (n == 1) return m[0][0];
    const Chart& c = m[0][0].chart();
    if (n == 2) {
        ScalarField acc = zero(c);
        accumulate(acc, m[0][0], m[1][1]);
        if (!m[0][1].is_zero() && !m[1][0].is_zero()) acc = acc - m[0][1] * m[1][0];
        return acc;
    }
    // Expand along the row with the most structural zeros.
    std::size_t best = 0;
    std::size_t best_zeros = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto zeros = static_cast<std::size_t>(
            std::count_if(m[i].begin(), m[i].end(), [](const ScalarField& f) { return f.is_zero(); }));
        if (zeros > best_zeros) {
            best = i;
            best_zeros = zeros;
        }
    }
    ScalarField acc = zero(c);
    for (std::size_t j = 0; j < n; ++j) {
        if (m[best][j].is_zero()) continue;
        FieldMatrix minor;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == best) continue;
            std::vector<ScalarField> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(std::move(row));
        }
        const ScalarField sub = determinant(minor);
        if (sub.is_zero()) continue;
        const ScalarField term = m[best][j] * sub;
        acc = (best + j) % 2 == 0 ? acc + term : acc - term;
    }
    return acc;
}

bool nondegenerate(const Eigen::MatrixXd& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return false;
    return std::fabs(m.determinant()) > 1e-12 * std::pow(scale, static_cast<double>(m.rows()));
}

std::vector<std::vector<ScalarField>> inverse(const std::vector<std::vector<ScalarField>>& m) {
    const std::size_t n = m.size();
    const Chart& c = m.at(0).at(0).chart();
    const bool constant = std::all_of(m.begin(), m.end(), [](const auto& row) {
        return std::all_of(row.begin(), row.end(), [](const ScalarField& f) { return f.constant_value().has_value(); });
    });
    FieldMatrix inv(n, std::vector<ScalarField>(n));
    if (constant) {
        Eigen::MatrixXd e(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) e(i, j) = *m[i][j].constant_value();
        if (!nondegenerate(e)) throw DegenerateError("matrix is singular");
        const Eigen::MatrixXd ie = e.inverse();
        const double tiny = 1e-15 * ie.cwiseAbs().maxCoeff();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                inv[i][j] = ScalarField::constant(c, std::fabs(ie(i, j)) <= tiny ? 0.0 : ie(i, j));
        return inv;
    }
    const ScalarField det = determinant(m);
    if (det.is_zero()) throw DegenerateError("matrix is structurally singular");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            // inv[i][j] = (-1)^{i+j} minor(j, i) / det
            FieldMatrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<ScalarField> row;
                for (std::size_t k = 0; k < n; ++k)
                    if (k != i) row.push_back(m[r][k]);
                minor.push_back(std::move(row));
            }
            ScalarField cof = n == 1 ? ScalarField::constant(c, 1.0) : determinant(minor);
            if ((i + j) % 2 == 1) cof = -cof;
            inv[i][j] = cof.is_zero() ? cof : cof / det;
        }
    return inv;
}

OperatorField operator_from_pair(const DifferentialForm& big_omega, const DifferentialForm& omega) {
    require_same(big_omega.chart(), omega.chart(), "operator_from_pair");
    if (big_omega.degree() != 2 || omega.degree() != 2) throw std::invalid_argument("operator_from_pair: need 2-forms");
    const auto inv = inverse(form_matrix(big_omega));
    const auto w = form_matrix(omega);
    const Chart& c = omega.chart();
    const std::size_t n = c.dim();
    FieldMatrix a(n, std::vector<ScalarField>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ScalarField acc = zero(c);
            for (std::size_t k = 0; k < n; ++k) accumulate(acc, inv[i][k], w[k][j]);
            a[i][j] = acc;
        }
    return {c, std::move(a)};
}

}  // namespace mas::ext
