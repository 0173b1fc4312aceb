#include "specrank/linops.hpp"

#include "specrank/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace specrank {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_length(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual) throw DimensionError(expected, actual, what);
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    check_length(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// CsrMatrix

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                   std::span<const Triplet> entries) {
    for (const auto& t : entries) {
        if (t.row >= rows || t.col >= cols)
            throw InvalidArgument("triplet (" + std::to_string(t.row) + ", " +
                                  std::to_string(t.col) + ") outside " + std::to_string(rows) +
                                  "x" + std::to_string(cols));
    }
    std::vector<Triplet> sorted(entries.begin(), entries.end());
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    CsrMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(rows + 1, 0);
    m.col_idx_.reserve(sorted.size());
    m.values_.reserve(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        const auto& t = sorted[k];
        if (k > 0 && sorted[k - 1].row == t.row && sorted[k - 1].col == t.col) {
            m.values_.back() += t.value;
            continue;
        }
        m.col_idx_.push_back(t.col);
        m.values_.push_back(t.value);
        ++m.row_ptr_[t.row + 1];
    }
    std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
    return m;
}

CsrMatrix CsrMatrix::from_dense(std::size_t rows, std::size_t cols,
                                std::span<const double> values) {
    check_length(rows * cols, values.size(), "CsrMatrix::from_dense");
    CsrMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(rows + 1, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double v = values[i * cols + j];
            if (v == 0.0) continue;
            m.col_idx_.push_back(j);
            m.values_.push_back(v);
        }
        m.row_ptr_[i + 1] = m.values_.size();
    }
    return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    check_length(cols_, x.size(), "CsrMatrix::multiply input");
    check_length(rows_, y.size(), "CsrMatrix::multiply output");
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
        y[i] = s;
    }
}

void CsrMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
    check_length(rows_, x.size(), "CsrMatrix::multiply_transpose input");
    check_length(cols_, y.size(), "CsrMatrix::multiply_transpose output");
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const double xi = x[i];
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_idx_[k]] += values_[k] * xi;
    }
}

// ---------------------------------------------------------------------------
// LinearOperator construction

LinearOperator LinearOperator::dense(std::size_t n, std::vector<double> values) {
    if (n == 0) throw InvalidArgument("operator dimension must be positive");
    check_length(n * n, values.size(), "LinearOperator::dense");
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    const double tol = 1e-12 * std::max(scale, 1e-300);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(values[i * n + j] - values[j * n + i]) > tol)
                throw InvalidArgument("dense operator is not symmetric at (" + std::to_string(i) +
                                      ", " + std::to_string(j) + ")");
    return {n, std::make_shared<const Payload>(DenseSymmetric{n, std::move(values)})};
}

LinearOperator LinearOperator::sparse(std::size_t n, std::span<const Triplet> entries,
                                      bool mirror_triangle) {
    if (n == 0) throw InvalidArgument("operator dimension must be positive");
    std::vector<Triplet> all(entries.begin(), entries.end());
    if (mirror_triangle) {
        for (const auto& t : entries)
            if (t.row != t.col) all.push_back({t.col, t.row, t.value});
    }
    CsrMatrix m = CsrMatrix::from_triplets(n, n, all);

    // Symmetry check on the assembled matrix: every (i, j) must have a matching (j, i).
    const auto& rp = m.row_ptr();
    const auto& ci = m.col_idx();
    const auto& va = m.values();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            const std::size_t j = ci[k];
            if (j == i) continue;
            const auto first = ci.begin() + static_cast<std::ptrdiff_t>(rp[j]);
            const auto last = ci.begin() + static_cast<std::ptrdiff_t>(rp[j + 1]);
            const auto it = std::lower_bound(first, last, i);
            const double mirror = (it != last && *it == i) ? va[static_cast<std::size_t>(it - ci.begin())] : 0.0;
            if (std::abs(mirror - va[k]) > 1e-12 * std::max(std::abs(va[k]), 1e-300))
                throw InvalidArgument("sparse operator is not symmetric at (" + std::to_string(i) +
                                      ", " + std::to_string(j) + ")");
        }
    }
    return {n, std::make_shared<const Payload>(SparseSymmetric{std::move(m)})};
}

LinearOperator LinearOperator::diagonal(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("operator dimension must be positive");
    const std::size_t n = values.size();
    return {n, std::make_shared<const Payload>(Diagonal{std::move(values)})};
}

LinearOperator LinearOperator::gram(CsrMatrix factor, GramSide side) {
    if (factor.rows() == 0 || factor.cols() == 0)
        throw InvalidArgument("Gram factor must be non-empty");
    if (side == GramSide::Auto)
        side = factor.cols() <= factor.rows() ? GramSide::XtX : GramSide::XXt;
    const std::size_t n = side == GramSide::XtX ? factor.cols() : factor.rows();
    auto shared = std::make_shared<const CsrMatrix>(std::move(factor));
    return {n, std::make_shared<const Payload>(Gram{std::move(shared), side})};
}

LinearOperator shift_scale(const LinearOperator& op, double lambda_min, double lambda_max) {
    if (!(lambda_max > lambda_min))
        throw InvalidArgument("invalid spectral window: lambda_max (" + std::to_string(lambda_max) +
                              ") must exceed lambda_min (" + std::to_string(lambda_min) + ")");
    const double c = 0.5 * (lambda_max + lambda_min);
    const double d = 0.5 * (lambda_max - lambda_min);
    auto inner = std::make_shared<const LinearOperator>(op);
    return {op.dimension(), std::make_shared<const LinearOperator::Payload>(
                                LinearOperator::ShiftedScaled{std::move(inner), c, d})};
}

// ---------------------------------------------------------------------------
// LinearOperator queries

std::size_t LinearOperator::nnz() const noexcept {
    return std::visit(
        Overloaded{
            [](const DenseSymmetric& p) { return p.n * p.n; },
            [](const SparseSymmetric& p) { return p.matrix.nnz(); },
            [](const Diagonal& p) { return p.values.size(); },
            [](const Gram& p) { return 2 * p.factor->nnz(); },
            [](const ShiftedScaled& p) { return p.inner->nnz(); },
        },
        *payload_);
}

std::string LinearOperator::kind() const {
    return std::visit(Overloaded{
                          [](const DenseSymmetric&) { return std::string("dense"); },
                          [](const SparseSymmetric&) { return std::string("sparse"); },
                          [](const Diagonal&) { return std::string("diagonal"); },
                          [](const Gram& p) {
                              return std::string(p.side == GramSide::XtX ? "gram(XtX)" : "gram(XXt)");
                          },
                          [](const ShiftedScaled& p) { return "shifted(" + p.inner->kind() + ")"; },
                      },
                      *payload_);
}

void LinearOperator::apply(std::span<const double> v, std::span<double> out) const {
    check_length(n_, v.size(), "LinearOperator::apply input");
    check_length(n_, out.size(), "LinearOperator::apply output");
    std::visit(Overloaded{
                   [&](const DenseSymmetric& p) {
                       const double* a = p.values.data();
                       for (std::size_t i = 0; i < p.n; ++i) {
                           const double* row = a + i * p.n;
                           // Four fixed partial sums: vectorizable and still
                           // independent of thread count.
                           double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
                           std::size_t j = 0;
                           for (; j + 4 <= p.n; j += 4) {
                               s0 += row[j] * v[j];
                               s1 += row[j + 1] * v[j + 1];
                               s2 += row[j + 2] * v[j + 2];
                               s3 += row[j + 3] * v[j + 3];
                           }
                           for (; j < p.n; ++j) s0 += row[j] * v[j];
                           out[i] = (s0 + s1) + (s2 + s3);
                       }
                   },
                   [&](const SparseSymmetric& p) { p.matrix.multiply(v, out); },
                   [&](const Diagonal& p) {
                       for (std::size_t i = 0; i < n_; ++i) out[i] = p.values[i] * v[i];
                   },
                   [&](const Gram& p) {
                       const CsrMatrix& x = *p.factor;
                       if (p.side == GramSide::XtX) {
                           Vector tmp(x.rows());
                           x.multiply(v, tmp);
                           x.multiply_transpose(tmp, out);
                       } else {
                           Vector tmp(x.cols());
                           x.multiply_transpose(v, tmp);
                           x.multiply(tmp, out);
                       }
                   },
                   [&](const ShiftedScaled& p) {
                       p.inner->apply(v, out);
                       const double inv = 1.0 / p.half_width;
                       for (std::size_t i = 0; i < n_; ++i) out[i] = (out[i] - p.center * v[i]) * inv;
                   },
               },
               *payload_);
}

Vector LinearOperator::apply(std::span<const double> v) const {
    Vector out(n_);
    apply(v, out);
    return out;
}

std::vector<double> LinearOperator::to_dense() const {
    return std::visit(
        Overloaded{
            [&](const DenseSymmetric& p) { return p.values; },
            [&](const SparseSymmetric& p) {
                std::vector<double> a(n_ * n_, 0.0);
                const auto& m = p.matrix;
                for (std::size_t i = 0; i < n_; ++i)
                    for (std::size_t k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k)
                        a[i * n_ + m.col_idx()[k]] = m.values()[k];
                return a;
            },
            [&](const Diagonal& p) {
                std::vector<double> a(n_ * n_, 0.0);
                for (std::size_t i = 0; i < n_; ++i) a[i * n_ + i] = p.values[i];
                return a;
            },
            [&](const auto&) {
                // Implicit variants: apply to the canonical basis.
                std::vector<double> a(n_ * n_, 0.0);
                Vector e(n_, 0.0), col(n_);
                for (std::size_t j = 0; j < n_; ++j) {
                    e[j] = 1.0;
                    apply(e, col);
                    e[j] = 0.0;
                    for (std::size_t i = 0; i < n_; ++i) a[i * n_ + j] = col[i];
                }
                // Symmetrize away rounding differences between the two products.
                for (std::size_t i = 0; i < n_; ++i)
                    for (std::size_t j = i + 1; j < n_; ++j) {
                        const double s = 0.5 * (a[i * n_ + j] + a[j * n_ + i]);
                        a[i * n_ + j] = a[j * n_ + i] = s;
                    }
                return a;
            },
        },
        *payload_);
}

std::optional<std::pair<double, double>> LinearOperator::gershgorin_bounds() const {
    return std::visit(
        Overloaded{
            [&](const DenseSymmetric& p) -> std::optional<std::pair<double, double>> {
                double lo = INFINITY, hi = -INFINITY;
                for (std::size_t i = 0; i < p.n; ++i) {
                    double radius = 0.0;
                    for (std::size_t j = 0; j < p.n; ++j)
                        if (j != i) radius += std::abs(p.values[i * p.n + j]);
                    const double a = p.values[i * p.n + i];
                    lo = std::min(lo, a - radius);
                    hi = std::max(hi, a + radius);
                }
                return std::pair{lo, hi};
            },
            [&](const SparseSymmetric& p) -> std::optional<std::pair<double, double>> {
                const auto& m = p.matrix;
                double lo = INFINITY, hi = -INFINITY;
                for (std::size_t i = 0; i < n_; ++i) {
                    double radius = 0.0, a = 0.0;
                    for (std::size_t k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k) {
                        if (m.col_idx()[k] == i)
                            a = m.values()[k];
                        else
                            radius += std::abs(m.values()[k]);
                    }
                    lo = std::min(lo, a - radius);
                    hi = std::max(hi, a + radius);
                }
                return std::pair{lo, hi};
            },
            [&](const Diagonal& p) -> std::optional<std::pair<double, double>> {
                const auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
                return std::pair{*lo, *hi};
            },
            [](const auto&) -> std::optional<std::pair<double, double>> { return std::nullopt; },
        },
        *payload_);
}

}  // namespace specrank
