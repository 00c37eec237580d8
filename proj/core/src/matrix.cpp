#include "dmc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dmc/error.hpp"
#include "dmc/parallel.hpp"

namespace dmc {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows * cols)
        throw validation_error("matrix: value count " + std::to_string(data_.size()) +
                               " does not match shape " + std::to_string(rows) + "x" +
                               std::to_string(cols));
}

bool Matrix::all_finite() const noexcept {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 2)
        throw validation_error("data matrix: need at least 2 samples, got " +
                               std::to_string(values_.rows()));
    if (values_.cols() < 1)
        throw validation_error("data matrix: need at least 1 feature");
    if (!values_.all_finite())
        throw validation_error("data matrix: non-finite entry");
}

SymmetricMatrix SymmetricMatrix::from_dense(Matrix dense) {
    if (dense.rows() != dense.cols())
        throw validation_error("symmetric matrix: shape " + std::to_string(dense.rows()) +
                               "x" + std::to_string(dense.cols()) + " is not square");
    if (!dense.all_finite())
        throw validation_error("symmetric matrix: non-finite entry");
    const std::size_t n = dense.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (dense(i, j) != dense(j, i))
                throw validation_error("symmetric matrix: entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") differs from its mirror");
    SymmetricMatrix out;
    out.values_ = std::move(dense);
    return out;
}

double SymmetricMatrix::frobenius_norm() const {
    double sum = 0.0;
    for (double v : values_.data()) sum += v * v;
    return std::sqrt(sum);
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    const std::size_t n = a.rows();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) sum += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(sum);
}

//! One cyclic sweep of Jacobi rotations over all (p, q), p < q, row order.
void jacobi_sweep(Matrix& a, Matrix& v) {
    const std::size_t n = a.rows();
    for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const double apq = a(p, q);
            if (apq == 0.0) continue;
            const double app = a(p, p);
            const double aqq = a(q, q);
            // Skip rotations that cannot change anything at double precision.
            if (std::abs(apq) < 1e-300) {
                a(p, q) = a(q, p) = 0.0;
                continue;
            }
            const double theta = 0.5 * (aqq - app) / apq;
            double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
            if (theta < 0.0) t = -t;
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;
            const double tau = s / (1.0 + c);

            a(p, p) = app - t * apq;
            a(q, q) = aqq + t * apq;
            a(p, q) = a(q, p) = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == p || k == q) continue;
                const double akp = a(k, p);
                const double akq = a(k, q);
                a(k, p) = a(p, k) = akp - s * (akq + tau * akp);
                a(k, q) = a(q, k) = akq + s * (akp - tau * akq);
            }
            for (std::size_t k = 0; k < n; ++k) {
                const double vkp = v(k, p);
                const double vkq = v(k, q);
                v(k, p) = vkp - s * (vkq + tau * vkp);
                v(k, q) = vkq + s * (vkp - tau * vkq);
            }
        }
    }
}

void fix_column_sign(Matrix& u, std::size_t col) {
    const std::size_t n = u.rows();
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::abs(u(i, col));
        if (mag > best) {
            best = mag;
            arg = i;
        }
    }
    if (u(arg, col) < 0.0)
        for (std::size_t i = 0; i < n; ++i) u(i, col) = -u(i, col);
}

} // namespace

EigenSystem sym_eig(const SymmetricMatrix& input, const JacobiOptions& opts) {
    const std::size_t n = input.order();
    Matrix a = input.matrix();
    Matrix v(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    const double tol = opts.tol_factor * input.frobenius_norm();

    bool converged = false;
    double off = off_diagonal_norm(a);
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        if (off <= tol) {
            converged = true;
            break;
        }
        jacobi_sweep(a, v);
        off = off_diagonal_norm(a);
    }
    if (!converged && off > tol)
        throw numerical_error("sym_eig: Jacobi iteration did not converge within " +
                                  std::to_string(opts.max_sweeps) +
                                  " sweeps (off-diagonal norm " + std::to_string(off) + ")",
                              off);

    // Sort eigenpairs by value descending; equal values keep index order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenSystem out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
        fix_column_sign(out.eigenvectors, k);
    }
    return out;
}

namespace {

constexpr std::size_t kDistBlock = 4096;

//! Squared distance between two rows: per-block sums over ascending feature
//! index, block sums combined by pairwise (binary tree) reduction.
double row_sq_dist(std::span<const double> a, std::span<const double> b) {
    const std::size_t p = a.size();
    if (p <= kDistBlock) {
        double s = 0.0;
        for (std::size_t k = 0; k < p; ++k) {
            const double d = a[k] - b[k];
            s += d * d;
        }
        return s;
    }
    std::vector<double> blocks;
    blocks.reserve((p + kDistBlock - 1) / kDistBlock);
    for (std::size_t k0 = 0; k0 < p; k0 += kDistBlock) {
        const std::size_t k1 = std::min(p, k0 + kDistBlock);
        double s = 0.0;
        for (std::size_t k = k0; k < k1; ++k) {
            const double d = a[k] - b[k];
            s += d * d;
        }
        blocks.push_back(s);
    }
    while (blocks.size() > 1) {
        std::size_t w = 0;
        for (std::size_t r = 0; r + 1 < blocks.size(); r += 2) blocks[w++] = blocks[r] + blocks[r + 1];
        if (blocks.size() % 2 == 1) blocks[w++] = blocks.back();
        blocks.resize(w);
    }
    return blocks[0];
}

} // namespace

SymmetricMatrix pairwise_sq_dists(const DataMatrix& x, unsigned workers) {
    const std::size_t n = x.rows();
    SymmetricMatrix out(n);
    parallel_for(n, workers, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j)
            out.set(i, j, row_sq_dist(x.row(i), x.row(j)));
    });
    return out;
}

} // namespace dmc
