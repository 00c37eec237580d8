#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dmc/matrix.hpp"

namespace dmc {

//! Gaussian affinity graph: W_ij = exp(-dist2_ij / epsilon), diagonal
//! exactly 1, together with its bandwidth and row sums D_ii = sum_j W_ij.
class AffinityGraph {
public:
    AffinityGraph(SymmetricMatrix w, double epsilon);

    std::size_t n() const noexcept { return w_.order(); }
    const SymmetricMatrix& w() const noexcept { return w_; }
    double epsilon() const noexcept { return epsilon_; }
    const std::vector<double>& row_sums() const noexcept { return row_sums_; }

private:
    SymmetricMatrix w_;
    double epsilon_;
    std::vector<double> row_sums_;
};

//! Bandwidth sweep: the weight sum L(eps) = sum_ij W_ij over a geometric
//! epsilon grid, plus the log-log slope curve used to find the linear region.
struct EpsilonScan {
    std::vector<double> grid;        // ascending epsilons
    std::vector<double> weight_sums; // L per grid point, in [n, n^2]
    std::vector<double> slope_curve; // d log L / d log eps, interior points
                                     // (slope_curve[r] belongs to grid[r+1])
    std::size_t n = 0;               // sample count of the scanned matrix
    std::optional<double> selected;  // filled in by select_epsilon
};

//! Grid exponents relative to reference distances: the grid spans
//! [10^lo * min nonzero dist2, 10^hi * max dist2].
struct DecadeRange {
    double lo = -3.5;
    double hi = 3.5;
};

//! Per-sample diffusion coordinates psi_ik = lambda_{k+1} v_{k+1}(x_i)
//! (the unit eigenpair is excluded), plus the retained eigenvalues and the
//! full spectrum of the transition matrix P.
struct DiffusionEmbedding {
    Matrix coords;                     // n x d
    std::vector<double> eigenvalues;   // lambda_2 .. lambda_{d+1}
    std::vector<double> full_spectrum; // all n eigenvalues, descending
    Matrix basis;                      // n x n: stationary-normalized eigenvectors of P
    std::size_t d = 0;
};

//! Builds the affinity graph for a squared-distance matrix.
//! Throws validation_error for epsilon <= 0.
AffinityGraph gaussian_affinity(const SymmetricMatrix& sq_dists, double epsilon);

//! L(eps) = sum_ij exp(-dist2_ij / eps), diagonal included.
double weight_sum(const SymmetricMatrix& sq_dists, double epsilon);

//! Sweeps L(eps) over a geometric grid with `points_per_decade` samples per
//! decade. Throws validation_error when all distances are zero.
EpsilonScan epsilon_scan(const SymmetricMatrix& sq_dists, DecadeRange decades = {},
                         std::size_t points_per_decade = 10, unsigned workers = 1);

//! Picks the grid epsilon nearest (in log eps) to the log-midpoint of the
//! rising window — the grid points whose log L lies in the middle 90% of the
//! band [log n, log n^2] — records it in scan.selected and returns it.
//! Throws validation_error when the curve is flat (max slope < 0.01).
double select_epsilon(EpsilonScan& scan);

//! Row-stochastic transition matrix P = D^-1 W.
Matrix transition_matrix(const AffinityGraph& graph);

//! Diffusion-map embedding at t = 1. Eigenpairs come from the symmetric
//! conjugate D^-1/2 W D^-1/2; eigenvectors are mapped back to eigenvectors
//! of P and rescaled to unit stationary-weighted norm, which makes the
//! Euclidean metric of the full (d = n-1) embedding equal the diffusion
//! distance. Pass d = 0 to choose the dimension from the spectral decay.
DiffusionEmbedding diffusion_embed(const AffinityGraph& graph, std::size_t d = 0);

//! One-step diffusion distance between samples i and j, computed directly
//! from the transition probabilities (no eigendecomposition):
//! sqrt( sum_k (P_ik - P_jk)^2 / phi_k ), phi_k = D_kk / sum_m D_mm.
double diffusion_distance(const AffinityGraph& graph, std::size_t i, std::size_t j);

//! Smallest d >= 1 with |lambda_{d+2}| / |lambda_2| < 0.05, capped at n-1;
//! 1 when the spectrum has no nontrivial part (|lambda_2| < 1e-12).
std::size_t choose_dim(const std::vector<double>& full_spectrum);

} // namespace dmc
