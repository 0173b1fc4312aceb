#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace specrank {

using Vector = std::vector<double>;

/// One stored entry of a coordinate-format matrix (0-based indices).
struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// General rectangular matrix in compressed-row storage.
class CsrMatrix {
public:
    CsrMatrix() = default;

    /// Builds from coordinate entries; duplicates are summed and explicit
    /// zeros are kept so the stored pattern matches the input.
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                   std::span<const Triplet> entries);

    /// Dense row-major input; exact zeros are dropped.
    static CsrMatrix from_dense(std::size_t rows, std::size_t cols,
                                std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    /// y = M x
    void multiply(std::span<const double> x, std::span<double> y) const;
    /// y = M^T x
    void multiply_transpose(std::span<const double> x, std::span<double> y) const;

    const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

/// Which square product a Gram operator represents.
enum class GramSide { Auto, XtX, XXt };

/// Symmetric operator accessed only through matrix-vector products.
///
/// The payload is immutable and shared, so copies are cheap and an operator
/// can be applied concurrently from any number of threads.
class LinearOperator {
public:
    struct DenseSymmetric {
        std::size_t n;
        std::vector<double> values;  // row-major n x n
    };
    struct SparseSymmetric {
        CsrMatrix matrix;  // both triangles stored
    };
    struct Diagonal {
        std::vector<double> values;
    };
    struct Gram {
        std::shared_ptr<const CsrMatrix> factor;
        GramSide side;  // resolved: XtX or XXt, never Auto
    };
    struct ShiftedScaled {
        std::shared_ptr<const LinearOperator> inner;
        double center;
        double half_width;
    };
    using Payload = std::variant<DenseSymmetric, SparseSymmetric, Diagonal, Gram, ShiftedScaled>;

    /// Row-major n x n values. Throws InvalidArgument if the input is not
    /// symmetric to 1e-12 relative.
    static LinearOperator dense(std::size_t n, std::vector<double> values);

    /// Sparse symmetric operator. With `mirror_triangle` every off-diagonal
    /// entry (i, j) also populates (j, i), which is how one-triangle storage is
    /// expanded. Without it the entries must already be symmetric.
    static LinearOperator sparse(std::size_t n, std::span<const Triplet> entries,
                                 bool mirror_triangle);

    static LinearOperator diagonal(std::vector<double> values);

    /// X^T X (dimension cols) or X X^T (dimension rows); Auto picks the smaller.
    static LinearOperator gram(CsrMatrix factor, GramSide side = GramSide::Auto);

    std::size_t dimension() const noexcept { return n_; }

    /// Stored entries touched by one matvec.
    std::size_t nnz() const noexcept;

    /// out = A v
    void apply(std::span<const double> v, std::span<double> out) const;
    Vector apply(std::span<const double> v) const;

    /// Row-major dense copy. Intended for oracle comparisons at desk scale.
    std::vector<double> to_dense() const;

    /// Exact bounds for Diagonal; Gershgorin discs for dense and sparse.
    /// Empty for the implicit variants.
    std::optional<std::pair<double, double>> gershgorin_bounds() const;

    const Payload& payload() const noexcept { return *payload_; }
    std::string kind() const;

private:
    LinearOperator(std::size_t n, std::shared_ptr<const Payload> payload)
        : n_(n), payload_(std::move(payload)) {}

    friend LinearOperator shift_scale(const LinearOperator&, double, double);

    std::size_t n_;
    std::shared_ptr<const Payload> payload_;
};

/// B = (A - cI)/d with c = (max+min)/2 and d = (max-min)/2, mapping
/// [lambda_min, lambda_max] onto [-1, 1].
LinearOperator shift_scale(const LinearOperator& op, double lambda_min, double lambda_max);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace specrank
