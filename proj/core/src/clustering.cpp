#include "dmc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dmc/diffusion.hpp"
#include "dmc/error.hpp"
#include "dmc/synth.hpp"

namespace dmc {

Partition::Partition(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
    if (k_ < 1) throw validation_error("partition: k must be >= 1");
    if (labels_.empty()) throw validation_error("partition: no samples");
    std::vector<bool> seen(static_cast<std::size_t>(k_), false);
    for (int label : labels_) {
        if (label < 0 || label >= k_)
            throw validation_error("partition: label " + std::to_string(label) +
                                   " outside 0.." + std::to_string(k_ - 1));
        seen[static_cast<std::size_t>(label)] = true;
    }
    for (int c = 0; c < k_; ++c)
        if (!seen[static_cast<std::size_t>(c)])
            throw validation_error("partition: cluster " + std::to_string(c) + " is empty");
}

std::vector<std::size_t> Partition::members(int c) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == c) out.push_back(i);
    return out;
}

bool partitions_equal(const Partition& a, const Partition& b) {
    if (a.size() != b.size() || a.k() != b.k()) return false;
    std::vector<int> fwd(static_cast<std::size_t>(a.k()), -1);
    std::vector<int> rev(static_cast<std::size_t>(b.k()), -1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto la = static_cast<std::size_t>(a[i]);
        const auto lb = static_cast<std::size_t>(b[i]);
        if (fwd[la] == -1 && rev[lb] == -1) {
            fwd[la] = static_cast<int>(lb);
            rev[lb] = static_cast<int>(la);
        } else if (fwd[la] != static_cast<int>(lb) || rev[lb] != static_cast<int>(la)) {
            return false;
        }
    }
    return true;
}

SpectralResult spectral_threshold(std::span<const double> first_coordinate) {
    if (first_coordinate.empty()) throw validation_error("spectral threshold: no samples");
    std::vector<int> labels(first_coordinate.size());
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < first_coordinate.size(); ++i) {
        // Exact zeros go to the positive side.
        const bool positive = !(first_coordinate[i] < 0.0);
        labels[i] = positive ? 1 : 0;
        (positive ? any_pos : any_neg) = true;
    }
    if (any_pos && any_neg) return {Partition(std::move(labels), 2), false};
    std::fill(labels.begin(), labels.end(), 0);
    return {Partition(std::move(labels), 1), true};
}

SpectralResult spectral_threshold(const DiffusionEmbedding& embedding) {
    if (embedding.d < 1) throw validation_error("spectral threshold: embedding has no coordinates");
    std::vector<double> first(embedding.coords.rows());
    for (std::size_t i = 0; i < first.size(); ++i) first[i] = embedding.coords(i, 0);
    return spectral_threshold(std::span<const double>{first});
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

struct LloydState {
    std::vector<int> assign;
    Matrix centroids;
    double wcss = 0.0;
    int iterations = 0;
};

//! One Lloyd run from a k-means++ (D^2 sampling) initialization, so distinct
//! restarts start from genuinely different centers. Empty clusters take the
//! point farthest from its assigned centroid (the point moves with it),
//! keeping WCSS monotone and every cluster nonempty.
LloydState lloyd_run(const Matrix& x, int k, std::uint64_t seed, int max_iters) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    const auto uk = static_cast<std::size_t>(k);

    NormalStream rng(seed);
    std::vector<std::size_t> centers;
    centers.push_back(static_cast<std::size_t>(rng.next_u64() % n));
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    while (centers.size() < uk) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            min_dist[i] = std::min(min_dist[i], sq_dist(x.row(i), x.row(centers.back())));
            total += min_dist[i];
        }
        // Pick the next center with probability proportional to its squared
        // distance from the chosen ones; a zero-weight point is never picked
        // unless every point coincides with a center already.
        std::size_t pick = 0;
        if (total > 0.0) {
            const double u = rng.next_uniform() * total; // in (0, total]
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += min_dist[i];
                if (u <= acc) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(pick);
    }

    LloydState st;
    st.centroids = Matrix(uk, p);
    for (std::size_t c = 0; c < uk; ++c)
        for (std::size_t f = 0; f < p; ++f) st.centroids(c, f) = x(centers[c], f);
    st.assign.assign(n, -1);

    double prev_wcss = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        std::vector<int> next(n);
        std::vector<double> cost(n);
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(x.row(i), st.centroids.row(0));
            for (std::size_t c = 1; c < uk; ++c) {
                const double d = sq_dist(x.row(i), st.centroids.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            next[i] = best;
            cost[i] = best_d;
        }

        std::vector<std::size_t> counts(uk, 0);
        for (int c : next) ++counts[static_cast<std::size_t>(c)];
        for (std::size_t c = 0; c < uk; ++c) {
            if (counts[c] > 0) continue;
            // Re-seed from the farthest point of a cluster that can spare
            // one (ties -> lowest index); such a cluster always exists.
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[static_cast<std::size_t>(next[i])] < 2) continue;
                if (far == n || cost[i] > cost[far]) far = i;
            }
            --counts[static_cast<std::size_t>(next[far])];
            next[far] = static_cast<int>(c);
            cost[far] = 0.0;
            counts[c] = 1;
        }

        double wcss_now = 0.0;
        for (double d : cost) wcss_now += d;
        if (wcss_now > prev_wcss * (1.0 + 1e-9) + 1e-30)
            throw numerical_error("kmeans: WCSS increased during Lloyd iteration",
                                  wcss_now - prev_wcss);
        prev_wcss = wcss_now;

        const bool fixed = next == st.assign;
        st.assign = std::move(next);
        st.iterations = iter + 1;

        for (std::size_t c = 0; c < uk; ++c)
            for (std::size_t f = 0; f < p; ++f) st.centroids(c, f) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(st.assign[i]);
            for (std::size_t f = 0; f < p; ++f) st.centroids(c, f) += x(i, f);
        }
        for (std::size_t c = 0; c < uk; ++c)
            for (std::size_t f = 0; f < p; ++f)
                st.centroids(c, f) /= static_cast<double>(counts[c]);

        if (fixed) break;
    }

    st.wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        st.wcss += sq_dist(x.row(i), st.centroids.row(static_cast<std::size_t>(st.assign[i])));
    return st;
}

//! Collapse labels to a dense 0..k-1 range ordered by first appearance.
Partition relabel(const std::vector<int>& raw) {
    std::vector<int> mapping(raw.size(), -1);
    std::vector<int> labels(raw.size());
    int next_id = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& m = mapping[static_cast<std::size_t>(raw[i])];
        if (m == -1) m = next_id++;
        labels[i] = m;
    }
    return Partition(std::move(labels), next_id);
}

} // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts) {
    const std::size_t n = points.rows();
    if (n == 0) throw validation_error("kmeans: no samples");
    if (k < 1) throw validation_error("kmeans: k must be >= 1");
    if (static_cast<std::size_t>(k) > n)
        throw validation_error("kmeans: k exceeds the number of samples");
    if (restarts < 1) throw validation_error("kmeans: need at least one restart");

    constexpr int kMaxIters = 300;
    LloydState best;
    bool have_best = false;
    for (int r = 0; r < restarts; ++r) {
        LloydState st = lloyd_run(points, k, seed + static_cast<std::uint64_t>(r), kMaxIters);
        if (!have_best || st.wcss < best.wcss) {
            best = std::move(st);
            have_best = true;
        }
    }
    return {relabel(best.assign), best.wcss, best.iterations};
}

Linkage linkage_from_string(const std::string& name) {
    if (name == "single") return Linkage::single;
    if (name == "complete") return Linkage::complete;
    if (name == "average") return Linkage::average;
    throw validation_error("unknown linkage '" + name + "' (single|complete|average)");
}

std::string to_string(Linkage linkage) {
    switch (linkage) {
        case Linkage::single: return "single";
        case Linkage::complete: return "complete";
        case Linkage::average: return "average";
    }
    return "?";
}

Dendrogram agglomerative(const SymmetricMatrix& dists, Linkage linkage) {
    const std::size_t n = dists.order();
    if (n < 2) throw validation_error("agglomerative: need at least 2 samples");
    for (std::size_t i = 0; i < n; ++i)
        if (dists(i, i) != 0.0)
            throw validation_error("agglomerative: nonzero diagonal at " + std::to_string(i));

    // Active clusters keyed by node id; d holds current inter-cluster
    // distances, updated by the Lance-Williams recurrences.
    std::vector<std::size_t> node;   // active node ids, ascending
    std::vector<std::size_t> size;   // cluster sizes, parallel to node
    Matrix d = dists.matrix();
    std::vector<std::size_t> slot(2 * n - 1); // node id -> row of d
    node.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        node.push_back(i);
        size.push_back(1);
        slot[i] = i;
    }

    Dendrogram tree;
    tree.n_leaves = n;
    tree.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t ai = 0, bi = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a + 1 < node.size(); ++a)
            for (std::size_t b = a + 1; b < node.size(); ++b) {
                const double v = d(slot[node[a]], slot[node[b]]);
                if (v < best) {
                    best = v;
                    ai = a;
                    bi = b;
                }
            }

        const std::size_t ida = node[ai];
        const std::size_t idb = node[bi];
        const std::size_t merged = n + step;
        tree.merges.push_back({std::min(ida, idb), std::max(ida, idb), best, merged});

        const std::size_t ra = slot[ida];
        const std::size_t rb = slot[idb];
        const double wa = static_cast<double>(size[ai]);
        const double wb = static_cast<double>(size[bi]);
        for (std::size_t c = 0; c < node.size(); ++c) {
            if (c == ai || c == bi) continue;
            const std::size_t rc = slot[node[c]];
            const double dca = d(ra, rc);
            const double dcb = d(rb, rc);
            double dnew = 0.0;
            switch (linkage) {
                case Linkage::single: dnew = std::min(dca, dcb); break;
                case Linkage::complete: dnew = std::max(dca, dcb); break;
                case Linkage::average: dnew = (wa * dca + wb * dcb) / (wa + wb); break;
            }
            d(ra, rc) = d(rc, ra) = dnew;
        }

        // Merged cluster reuses the left slot; right cluster leaves the pool.
        slot[merged] = ra;
        node[ai] = merged;
        size[ai] = size[ai] + size[bi];
        node.erase(node.begin() + static_cast<std::ptrdiff_t>(bi));
        size.erase(size.begin() + static_cast<std::ptrdiff_t>(bi));
    }
    return tree;
}

Partition cut_dendrogram(const Dendrogram& tree, int k) {
    const std::size_t n = tree.n_leaves;
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw validation_error("cut_dendrogram: k must be in 1..n");
    if (tree.merges.size() != n - 1)
        throw validation_error("cut_dendrogram: dendrogram has wrong merge count");

    // Union-find over all but the k-1 last (highest) merges.
    std::vector<std::size_t> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    const std::size_t applied = n - static_cast<std::size_t>(k);
    for (std::size_t t = 0; t < applied; ++t) {
        const auto& m = tree.merges[t];
        const std::size_t a = find(m.left);
        const std::size_t b = find(m.right);
        parent[a] = m.id;
        parent[b] = m.id;
    }

    std::vector<int> labels(n);
    std::vector<int> cluster_of(2 * n - 1, -1);
    int next_id = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (cluster_of[root] == -1) cluster_of[root] = next_id++;
        labels[i] = cluster_of[root];
    }
    return Partition(std::move(labels), next_id);
}

SymmetricMatrix sqrt_distances(const SymmetricMatrix& sq_dists) {
    const std::size_t n = sq_dists.order();
    SymmetricMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.set(i, j, std::sqrt(sq_dists(i, j)));
    return out;
}

} // namespace dmc
