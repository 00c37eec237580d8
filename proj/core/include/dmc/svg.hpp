#pragma once

#include <span>
#include <string>
#include <vector>

#include "dmc/clustering.hpp"
#include "dmc/diffusion.hpp"
#include "dmc/matrix.hpp"

namespace dmc {

//! One heatmap panel of absolute correlations (entries in [0, 1]).
struct CorrelationPanel {
    std::string title;
    SymmetricMatrix values;
};

//! One method's coordinates in the overlay plot. Columns beyond the first
//! two are ignored; a single-column embedding is drawn at y = 0.
struct ComparisonSeries {
    std::string name;
    Matrix coords;
};

//! All emitters return a self-contained 800x600 SVG document whose bytes
//! depend only on the arguments. Empty or inconsistent data is refused with
//! validation_error before any rendering happens.

//! Scatter of the first two embedding coordinates, one symbol per cluster
//! (cross, circle, ...), with the dividing threshold line drawn at x = 0.
std::string svg_embedding(const Matrix& coords, std::span<const int> labels);

//! log-log curve of the weight sum L(epsilon), with the n and n^2 asymptotes
//! and, when present, a vertical line at the selected epsilon.
std::string svg_epsilon_scan(const EpsilonScan& scan);

//! Merge tree with leaves on the baseline and U-links at merge distance.
std::string svg_dendrogram(const Dendrogram& tree, Linkage linkage);

//! Side-by-side heatmap panels sharing one white-to-blue ramp over [0, 1].
std::string svg_correlation(std::span<const CorrelationPanel> panels);

//! Overlay of several embeddings, each scaled to unit max-absolute value
//! per axis; color encodes the method, symbol encodes the cluster.
std::string svg_comparison(std::span<const ComparisonSeries> series, std::span<const int> labels);

} // namespace dmc
