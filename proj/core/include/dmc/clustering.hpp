#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmc/matrix.hpp"

namespace dmc {

//! Cluster assignment per sample. Labels are 0..k-1 and every label occurs;
//! two partitions are considered equal up to a bijection of label ids.
class Partition {
public:
    Partition(std::vector<int> labels, int k);

    const std::vector<int>& labels() const noexcept { return labels_; }
    int k() const noexcept { return k_; }
    std::size_t size() const noexcept { return labels_.size(); }
    int operator[](std::size_t i) const { return labels_[i]; }

    //! Sample indices belonging to cluster `c`, ascending.
    std::vector<std::size_t> members(int c) const;

private:
    std::vector<int> labels_;
    int k_;
};

//! True iff the labelings coincide up to a relabeling bijection.
bool partitions_equal(const Partition& a, const Partition& b);

struct SpectralResult {
    Partition partition;
    //! Set when thresholding left one side empty and k collapsed to 1.
    bool degenerate_split = false;
};

class DiffusionEmbedding; // diffusion.hpp

//! Sign threshold on the first embedding coordinate: label 1 where
//! psi_2 > 0 or exactly 0, label 0 where psi_2 < 0.
SpectralResult spectral_threshold(const DiffusionEmbedding& embedding);
SpectralResult spectral_threshold(std::span<const double> first_coordinate);

struct KMeansResult {
    Partition partition;
    double wcss = 0.0;
    //! Lloyd iterations used by the winning restart.
    int iterations = 0;
};

//! Lloyd's k-means, best of `restarts` runs by within-cluster sum of squared
//! distances. Initialization is greedy farthest-point from a seeded first
//! pick; restart r uses seed + r, so the result is deterministic.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 10);

enum class Linkage { single, complete, average };

Linkage linkage_from_string(const std::string& name);
std::string to_string(Linkage linkage);

//! Bottom-up merge tree. Leaves are 0..n-1, merge t creates node n+t.
struct Dendrogram {
    struct Merge {
        std::size_t left;  // smaller node id
        std::size_t right; // larger node id
        double height;
        std::size_t id; // id of the merged node
    };
    std::size_t n_leaves = 0;
    std::vector<Merge> merges;
};

//! Agglomerative clustering over a symmetric zero-diagonal distance matrix
//! using Lance-Williams updates. Ties break on the lowest (left, right) pair.
Dendrogram agglomerative(const SymmetricMatrix& dists, Linkage linkage);

//! Drops the k-1 highest merges; connected components become clusters,
//! numbered by their smallest leaf.
Partition cut_dendrogram(const Dendrogram& tree, int k);

//! Entrywise square root of a squared-distance matrix.
SymmetricMatrix sqrt_distances(const SymmetricMatrix& sq_dists);

} // namespace dmc
