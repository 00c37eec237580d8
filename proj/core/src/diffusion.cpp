#include "dmc/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dmc/error.hpp"
#include "dmc/parallel.hpp"

namespace dmc {

AffinityGraph::AffinityGraph(SymmetricMatrix w, double epsilon)
    : w_(std::move(w)), epsilon_(epsilon) {
    if (!(epsilon_ > 0.0)) throw validation_error("affinity graph: epsilon must be positive");
    const std::size_t n = w_.order();
    if (n < 2) throw validation_error("affinity graph: need at least 2 samples");
    row_sums_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (w_(i, i) != 1.0)
            throw validation_error("affinity graph: diagonal entry " + std::to_string(i) +
                                   " is not 1");
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = w_(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw validation_error("affinity graph: weight (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") outside [0,1]");
            sum += v;
        }
        row_sums_[i] = sum;
    }
}

AffinityGraph gaussian_affinity(const SymmetricMatrix& sq_dists, double epsilon) {
    if (!(epsilon > 0.0)) throw validation_error("gaussian_affinity: epsilon must be positive");
    const std::size_t n = sq_dists.order();
    SymmetricMatrix w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w.set(i, i, 1.0);
        for (std::size_t j = i + 1; j < n; ++j)
            w.set(i, j, std::exp(-sq_dists(i, j) / epsilon));
    }
    return AffinityGraph(std::move(w), epsilon);
}

double weight_sum(const SymmetricMatrix& sq_dists, double epsilon) {
    const std::size_t n = sq_dists.order();
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) off += std::exp(-sq_dists(i, j) / epsilon);
    return static_cast<double>(n) + 2.0 * off;
}

EpsilonScan epsilon_scan(const SymmetricMatrix& sq_dists, DecadeRange decades,
                         std::size_t points_per_decade, unsigned workers) {
    const std::size_t n = sq_dists.order();
    if (n < 2) throw validation_error("epsilon scan: need at least 2 samples");
    if (points_per_decade < 1)
        throw validation_error("epsilon scan: points_per_decade must be >= 1");
    if (!(decades.hi > decades.lo))
        throw validation_error("epsilon scan: empty decade range");

    double min_nz = 0.0, max_d = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = sq_dists(i, j);
            if (d > 0.0 && (min_nz == 0.0 || d < min_nz)) min_nz = d;
            max_d = std::max(max_d, d);
        }
    if (min_nz == 0.0)
        throw validation_error("epsilon scan: all pairwise distances are zero");

    const double lo = std::log10(min_nz) + decades.lo;
    const double hi = std::log10(max_d) + decades.hi;
    const auto m = static_cast<std::size_t>(std::ceil((hi - lo) * static_cast<double>(points_per_decade))) + 1;

    EpsilonScan scan;
    scan.n = n;
    scan.grid.resize(m);
    scan.weight_sums.resize(m);
    const double step = (hi - lo) / static_cast<double>(m - 1);
    for (std::size_t k = 0; k < m; ++k) scan.grid[k] = std::pow(10.0, lo + step * static_cast<double>(k));

    parallel_for(m, workers,
                 [&](std::size_t k) { scan.weight_sums[k] = weight_sum(sq_dists, scan.grid[k]); });

    scan.slope_curve.resize(m >= 3 ? m - 2 : 0);
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double dlogl = std::log(scan.weight_sums[k + 1]) - std::log(scan.weight_sums[k - 1]);
        const double dloge = std::log(scan.grid[k + 1]) - std::log(scan.grid[k - 1]);
        scan.slope_curve[k - 1] = dlogl / dloge;
    }
    return scan;
}

double select_epsilon(EpsilonScan& scan) {
    if (scan.grid.size() < 5)
        throw validation_error("select_epsilon: need at least 5 grid points");
    if (scan.slope_curve.empty())
        throw validation_error("select_epsilon: scan has no interior slopes");

    const double peak = *std::max_element(scan.slope_curve.begin(), scan.slope_curve.end());
    if (peak < 0.01)
        throw validation_error(
            "select_epsilon: weight-sum curve is flat (peak slope < 0.01); no linear region, "
            "pass an explicit epsilon");

    // The rising window: grid points whose log L sits in the middle 90% of
    // the band between the asymptotes L = n and L = n². Its log-midpoint is
    // the centre of the curve's linear region. A steepest-run midpoint is not
    // used because data with one tight and one loose cluster produces a
    // two-step curve whose steepest run covers only the tight cluster's
    // scale — a bandwidth there leaves the loose cluster disconnected.
    const double log_n = std::log(static_cast<double>(scan.n)); // log n² − log n
    std::size_t first = scan.grid.size(), last = 0;
    for (std::size_t i = 0; i < scan.grid.size(); ++i) {
        const double y = (std::log(scan.weight_sums[i]) - log_n) / log_n;
        if (y < 0.05 || y > 0.95) continue;
        if (first == scan.grid.size()) first = i;
        last = i;
    }

    std::size_t idx;
    if (first == scan.grid.size()) {
        // The whole rise fell between two grid points: take the steepest one.
        const auto it = std::max_element(scan.slope_curve.begin(), scan.slope_curve.end());
        idx = static_cast<std::size_t>(it - scan.slope_curve.begin()) + 1;
    } else {
        const double target = 0.5 * (std::log(scan.grid[first]) + std::log(scan.grid[last]));
        idx = first;
        double best = std::abs(std::log(scan.grid[first]) - target);
        for (std::size_t i = first + 1; i <= last; ++i) {
            const double dist = std::abs(std::log(scan.grid[i]) - target);
            if (dist < best) {
                best = dist;
                idx = i;
            }
        }
    }
    scan.selected = scan.grid[idx];
    return scan.grid[idx];
}

Matrix transition_matrix(const AffinityGraph& graph) {
    const std::size_t n = graph.n();
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double inv = 1.0 / graph.row_sums()[i];
        for (std::size_t j = 0; j < n; ++j) p(i, j) = graph.w()(i, j) * inv;
    }
    return p;
}

DiffusionEmbedding diffusion_embed(const AffinityGraph& graph, std::size_t d) {
    const std::size_t n = graph.n();
    if (d >= n)
        throw validation_error("diffusion_embed: d must be at most n-1 (" + std::to_string(d) +
                               " >= " + std::to_string(n) + ")");

    // Symmetric conjugate of P: same spectrum, Jacobi-friendly.
    std::vector<double> inv_sqrt_d(n);
    for (std::size_t i = 0; i < n; ++i) inv_sqrt_d[i] = 1.0 / std::sqrt(graph.row_sums()[i]);
    SymmetricMatrix conj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            conj.set(i, j, graph.w()(i, j) * inv_sqrt_d[i] * inv_sqrt_d[j]);

    EigenSystem eig = sym_eig(conj);

    if (std::abs(eig.eigenvalues[0] - 1.0) > 1e-10)
        throw numerical_error("diffusion_embed: top eigenvalue deviates from 1",
                              std::abs(eig.eigenvalues[0] - 1.0));
    for (double lambda : eig.eigenvalues)
        if (std::abs(lambda) > 1.0 + 1e-10)
            throw numerical_error("diffusion_embed: eigenvalue outside [-1, 1]",
                                  std::abs(lambda) - 1.0);

    double total_weight = 0.0;
    for (double s : graph.row_sums()) total_weight += s;

    // Eigenvectors of P with unit stationary-weighted norm. For a unit
    // eigenvector u of the conjugate, sum_i phi_i (u_i / sqrt(D_i))^2 is
    // exactly 1 / sum(D); normalize per column anyway to absorb rounding.
    Matrix basis(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double wnorm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = eig.eigenvectors(i, k) * inv_sqrt_d[i];
            basis(i, k) = v;
            wnorm2 += graph.row_sums()[i] / total_weight * v * v;
        }
        const double scale = 1.0 / std::sqrt(wnorm2);
        for (std::size_t i = 0; i < n; ++i) basis(i, k) *= scale;
    }

    DiffusionEmbedding out;
    out.full_spectrum = eig.eigenvalues;
    out.d = d > 0 ? d : choose_dim(out.full_spectrum);
    out.coords = Matrix(n, out.d);
    out.eigenvalues.assign(eig.eigenvalues.begin() + 1, eig.eigenvalues.begin() + 1 + out.d);
    for (std::size_t k = 0; k < out.d; ++k)
        for (std::size_t i = 0; i < n; ++i)
            out.coords(i, k) = out.eigenvalues[k] * basis(i, k + 1);
    out.basis = std::move(basis);
    return out;
}

double diffusion_distance(const AffinityGraph& graph, std::size_t i, std::size_t j) {
    const std::size_t n = graph.n();
    if (i >= n || j >= n) throw validation_error("diffusion_distance: sample index out of range");
    double total_weight = 0.0;
    for (double s : graph.row_sums()) total_weight += s;

    const double inv_di = 1.0 / graph.row_sums()[i];
    const double inv_dj = 1.0 / graph.row_sums()[j];
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double diff = graph.w()(i, k) * inv_di - graph.w()(j, k) * inv_dj;
        sum += diff * diff * total_weight / graph.row_sums()[k];
    }
    return std::sqrt(sum);
}

std::size_t choose_dim(const std::vector<double>& spectrum) {
    const std::size_t n = spectrum.size();
    if (n < 2) throw validation_error("choose_dim: spectrum too short");
    const double lambda2 = std::abs(spectrum[1]);
    if (lambda2 < 1e-12) return 1;
    for (std::size_t d = 1; d + 1 < n; ++d)
        if (std::abs(spectrum[d + 1]) / lambda2 < 0.05) return d;
    return n - 1;
}

} // namespace dmc
