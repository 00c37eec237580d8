#pragma once

#include <cstddef>
#include <vector>

#include "dmc/matrix.hpp"

namespace dmc {

//! Embedding produced by PCA or kernel PCA: component scores plus the share
//! of variance each retained component explains (descending, sums to <= 1).
struct LinearEmbedding {
    Matrix coords; // n x d
    std::vector<double> explained;
    std::size_t d = 0;
};

//! Principal-component scores of the centered rows, computed through the
//! n x n Gram matrix (the small-n route). Component signs follow the
//! sym_eig convention.
LinearEmbedding pca_embed(const DataMatrix& x, std::size_t d);

//! Kernel PCA with the Gaussian kernel: double-centered affinity matrix,
//! coordinates sqrt(lambda_k) u_k. Negative (numerical) eigenvalues clamp
//! to zero. Requires d <= n-1 and epsilon > 0.
LinearEmbedding kernel_pca_embed(const DataMatrix& x, double epsilon, std::size_t d);

} // namespace dmc
