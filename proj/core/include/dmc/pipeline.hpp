#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dmc/baselines.hpp"
#include "dmc/clustering.hpp"
#include "dmc/diffusion.hpp"
#include "dmc/matrix.hpp"

namespace dmc {

//! What the hierarchical baseline measures distances on: Euclidean distances
//! between the working data rows, or 1 - |corr| between samples.
enum class HierarchicalInput { raw, correlation };

HierarchicalInput hier_input_from_string(const std::string& name);
std::string to_string(HierarchicalInput mode);

struct RunConfig {
    std::filesystem::path input;
    bool header = false;
    //! Apply the signed-log transform before anything else.
    bool normalize = true;
    //! Bandwidth; empty selects one from the weight-sum scan.
    std::optional<double> epsilon;
    //! Embedding dimension; empty applies the spectral-decay rule.
    std::optional<std::size_t> dims;
    //! Cluster count for k-means and the dendrogram cut (the spectral split
    //! is always the two-sided zero threshold).
    int k = 2;
    Linkage linkage = Linkage::average;
    HierarchicalInput hier_input = HierarchicalInput::raw;
    std::uint64_t seed = 42;
    int kmeans_restarts = 10;
    std::filesystem::path out_dir = "dmc-out";
    //! Thread count for the parallel kernels; 0 means one per hardware
    //! thread. Outputs are identical for any value.
    unsigned workers = 0;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

//! Everything computed by one pipeline run. Partition-bearing members are
//! optional only because they are filled stage by stage; a returned bundle
//! always has them set.
struct ResultBundle {
    std::size_t n = 0;
    std::size_t p = 0;
    bool normalized = false;

    EpsilonScan scan;
    double epsilon = 0.0;

    //! Embedding with d_plot = max(d, min(2, n-1)) columns so the scatter
    //! plots always have two axes; artifacts report the first `d` columns.
    DiffusionEmbedding embedding;
    std::size_t d = 0;

    std::optional<SpectralResult> spectral;
    std::optional<KMeansResult> km;
    Dendrogram dendrogram;
    std::optional<Partition> hierarchical;
    bool all_methods_equal = false;

    LinearEmbedding pca;
    LinearEmbedding kpca;

    SymmetricMatrix corr_all;
    //! Per spectral cluster: member indices and their correlation submatrix.
    std::vector<std::vector<std::size_t>> cluster_members;
    std::vector<SymmetricMatrix> corr_clusters;

    std::vector<StageTiming> timings;
    std::vector<std::string> artifacts; // file names written into out_dir
};

//! Runs the whole chain: load -> normalize -> distances -> epsilon scan and
//! selection -> embed -> cluster (spectral threshold, k-means, agglomerative
//! cut) -> PCA / kernel-PCA baselines -> correlations; then writes
//! embedding.csv, labels.json, epsilon_scan.csv, corr_all.csv,
//! corr_cluster<id>.csv, report.json and the SVG figures into cfg.out_dir.
//!
//! Every error is rethrown with the failing stage's name prefixed; artifacts
//! already written by a failing run are removed. report.json is byte-stable
//! across runs and worker counts except for the "timings" member.
ResultBundle run_pipeline(const RunConfig& cfg);

std::string dmc_version();

} // namespace dmc
