#include "dmc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dmc/diffusion.hpp"
#include "dmc/error.hpp"

namespace dmc {

namespace {

//! Column means subtracted from each row.
Matrix center_rows(const DataMatrix& x) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    std::vector<double> mean(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k) mean[k] += x(i, k);
    for (double& m : mean) m /= static_cast<double>(n);
    Matrix out(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k) out(i, k) = x(i, k) - mean[k];
    return out;
}

LinearEmbedding scores_from_eig(const EigenSystem& eig, std::size_t d) {
    const std::size_t n = eig.eigenvectors.rows();
    double total = 0.0;
    for (double v : eig.eigenvalues) total += std::max(v, 0.0);

    LinearEmbedding out;
    out.d = d;
    out.coords = Matrix(n, d);
    out.explained.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double lambda = std::max(eig.eigenvalues[k], 0.0);
        const double scale = std::sqrt(lambda);
        for (std::size_t i = 0; i < n; ++i) out.coords(i, k) = scale * eig.eigenvectors(i, k);
        out.explained[k] = total > 0.0 ? lambda / total : 0.0;
    }
    return out;
}

} // namespace

LinearEmbedding pca_embed(const DataMatrix& x, std::size_t d) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (d < 1 || d > std::min(n, p))
        throw validation_error("pca_embed: d must be in 1..min(n,p), got " + std::to_string(d));

    const Matrix xc = center_rows(x);
    SymmetricMatrix gram(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < p; ++k) s += xc(i, k) * xc(j, k);
            gram.set(i, j, s);
        }
    return scores_from_eig(sym_eig(gram), d);
}

LinearEmbedding kernel_pca_embed(const DataMatrix& x, double epsilon, std::size_t d) {
    const std::size_t n = x.rows();
    if (d < 1 || d > n - 1)
        throw validation_error("kernel_pca_embed: d must be in 1..n-1, got " + std::to_string(d));
    const AffinityGraph graph = gaussian_affinity(pairwise_sq_dists(x), epsilon);
    const SymmetricMatrix& kernel = graph.w();

    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row_mean[i] += kernel(i, j);
        grand += row_mean[i];
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n) * static_cast<double>(n);

    SymmetricMatrix centered(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            centered.set(i, j, kernel(i, j) - row_mean[i] - row_mean[j] + grand);

    return scores_from_eig(sym_eig(centered), d);
}

} // namespace dmc
