#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dmc {

//! Dense row-major matrix of doubles. The workhorse container; no
//! invariants beyond shape, used for intermediate results, eigenvector
//! tables and embeddings.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

//! n x p dataset, rows are samples and columns features. Validated at
//! construction (n >= 2, p >= 1, all entries finite) and immutable after.
class DataMatrix {
public:
    explicit DataMatrix(Matrix values);
    DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : DataMatrix(Matrix(rows, cols, std::move(values))) {}

    std::size_t rows() const noexcept { return values_.rows(); }
    std::size_t cols() const noexcept { return values_.cols(); }
    double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
    std::span<const double> row(std::size_t i) const { return values_.row(i); }
    const Matrix& matrix() const noexcept { return values_; }

private:
    Matrix values_;
};

//! Symmetric n x n matrix. Entries are stored mirrored; set() writes both
//! triangles so symmetry is bit-exact by construction.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t order) : values_(order, order, 0.0) {}

    //! Validates exact symmetry and finiteness of a full dense matrix.
    static SymmetricMatrix from_dense(Matrix dense);

    std::size_t order() const noexcept { return values_.rows(); }

    double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
    void set(std::size_t i, std::size_t j, double v) {
        values_(i, j) = v;
        values_(j, i) = v;
    }

    const Matrix& matrix() const noexcept { return values_; }

    double frobenius_norm() const;

private:
    Matrix values_;
};

//! Eigendecomposition of a symmetric matrix: eigenvalues sorted descending,
//! eigenvector k in column k of an orthonormal matrix, signs fixed so the
//! largest-magnitude entry of each vector is positive (ties: lowest index).
struct EigenSystem {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

struct JacobiOptions {
    //! One sweep visits every (p, q) pair once in row-cyclic order.
    int max_sweeps = 100;
    //! Converged when off-diagonal Frobenius norm <= tol_factor * |A|_F.
    double tol_factor = 1e-12;
};

//! Eigendecomposition by cyclic Jacobi rotations. Deterministic: fixed
//! rotation order, fixed sort (value descending, index ascending on ties),
//! fixed sign convention. Throws numerical_error (with the achieved
//! off-diagonal norm) if the sweep cap is hit before convergence.
EigenSystem sym_eig(const SymmetricMatrix& a, const JacobiOptions& opts = {});

//! Squared Euclidean distances between all row pairs. Accumulation order is
//! fixed (ascending feature index within blocks of 4096, block sums combined
//! pairwise), so results are bit-identical for any worker count.
SymmetricMatrix pairwise_sq_dists(const DataMatrix& x, unsigned workers = 1);

} // namespace dmc
