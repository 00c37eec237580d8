#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "dmc/clustering.hpp"
#include "dmc/diffusion.hpp"
#include "dmc/error.hpp"
#include "dmc/matrix.hpp"
#include "dmc/synth.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace dmc;
using test::cluster_dist;
using test::exhaustive_wcss2;
using test::naive_agglomerative;
using test::recompute_wcss;

namespace {

SymmetricMatrix line_dists() {
    // points at 0, 1, 10 on a line (plain distances, not squared)
    SymmetricMatrix d(3);
    d.set(0, 1, 1.0);
    d.set(1, 2, 9.0);
    d.set(0, 2, 10.0);
    return d;
}

} // namespace

TEST_SUITE("clustering") {

TEST_CASE("partition: validation and membership") {
    CHECK_THROWS_AS(Partition({0, 0, 2}, 3), validation_error); // label 1 missing
    CHECK_THROWS_AS(Partition({0, 1, 1}, 1), validation_error); // label out of range
    Partition p({1, 0, 1}, 2);
    CHECK(p.members(1) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("partitions_equal: label bijections") {
    CHECK(partitions_equal(Partition({0, 0, 1}, 2), Partition({1, 1, 0}, 2)));
    CHECK(!partitions_equal(Partition({0, 0, 1}, 2), Partition({0, 1, 1}, 2)));
    CHECK(!partitions_equal(Partition({0, 0, 1}, 2), Partition({0, 1, 2}, 3)));

    NormalStream rng(29);
    for (int t = 0; t < 20; ++t) {
        std::vector<int> labels(12);
        for (auto& l : labels) l = static_cast<int>(rng.next_u64() % 3);
        labels[0] = 0, labels[1] = 1, labels[2] = 2; // keep every label present
        const int swap[3] = {2, 0, 1};
        std::vector<int> mapped(12);
        for (std::size_t i = 0; i < 12; ++i) mapped[i] = swap[labels[i]];
        CHECK(partitions_equal(Partition(labels, 3), Partition(mapped, 3)));
    }
}

TEST_CASE("spectral_threshold: sign split with zeros to the positive side") {
    const double coords[] = {-0.3, -0.1, 0.2, 0.4};
    auto r = spectral_threshold(std::span<const double>(coords, 4));
    CHECK(!r.degenerate_split);
    CHECK(r.partition.labels() == std::vector<int>{0, 0, 1, 1});

    const double with_zero[] = {-1.0, 0.0, 2.0};
    CHECK(spectral_threshold(std::span<const double>(with_zero, 3)).partition.labels() ==
          std::vector<int>{0, 1, 1});
}

TEST_CASE("spectral_threshold: all-zero coordinate degenerates to one cluster") {
    const double coords[] = {0.0, 0.0, 0.0};
    auto r = spectral_threshold(std::span<const double>(coords, 3));
    CHECK(r.degenerate_split);
    CHECK(r.partition.k() == 1);
}

TEST_CASE("spectral_threshold: invariant under sign flip") {
    const double coords[] = {-0.5, 0.3, -0.2, 0.9, 0.1};
    const double flipped[] = {0.5, -0.3, 0.2, -0.9, -0.1};
    auto a = spectral_threshold(std::span<const double>(coords, 5));
    auto b = spectral_threshold(std::span<const double>(flipped, 5));
    CHECK(partitions_equal(a.partition, b.partition));
}

TEST_CASE("spectral_threshold: recovers planted blobs") {
    auto [x, truth] = make_dense_sparse(test::wide_two_blob(11));
    auto d = pairwise_sq_dists(x);
    auto scan = epsilon_scan(d);
    auto emb = diffusion_embed(gaussian_affinity(d, select_epsilon(scan)));
    auto r = spectral_threshold(emb);
    CHECK(!r.degenerate_split);
    CHECK(partitions_equal(r.partition, truth));
}

TEST_CASE("kmeans: two points, two clusters") {
    Matrix pts(2, 2, {0, 0, 0, 1});
    auto r = kmeans(pts, 2, 1);
    CHECK(r.wcss == 0.0);
    CHECK(r.partition.k() == 2);
    CHECK(r.partition[0] != r.partition[1]);
}

TEST_CASE("kmeans: k = 1 gives the total scatter") {
    auto pts = test::random_matrix(7, 3, 43);
    auto r = kmeans(pts, 1, 9);
    CHECK(r.wcss == doctest::Approx(recompute_wcss(pts, std::vector<int>(7, 0), 1)).epsilon(1e-12));
}

TEST_CASE("kmeans: matches the exhaustive bipartition optimum") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        auto pts = test::random_matrix(6, 2, seed);
        auto r = kmeans(pts, 2, seed, 10);
        const double best = exhaustive_wcss2(pts);
        CHECK(r.wcss == doctest::Approx(best).epsilon(1e-9));
        CHECK(r.wcss >= best - 1e-9); // can never beat the exhaustive minimum
        CHECK(r.wcss ==
              doctest::Approx(recompute_wcss(pts, r.partition.labels(), 2)).epsilon(1e-12));
    }
}

TEST_CASE("kmeans: deterministic per seed, restarts never hurt") {
    auto pts = test::random_matrix(15, 3, 47);
    auto a = kmeans(pts, 3, 7, 10);
    auto b = kmeans(pts, 3, 7, 10);
    CHECK(a.partition.labels() == b.partition.labels());
    CHECK(a.wcss == b.wcss);

    auto single = kmeans(pts, 3, 7, 1);
    CHECK(a.wcss <= single.wcss + 1e-12);
}

TEST_CASE("kmeans: duplicate points still fill every cluster") {
    Matrix pts(4, 2, {0, 0, 0, 0, 0, 0, 10, 10});
    auto r = kmeans(pts, 3, 5);
    CHECK(r.partition.k() == 3);
    CHECK(r.wcss == doctest::Approx(0.0).epsilon(1e-15));
    std::vector<int> seen(3, 0);
    for (int l : r.partition.labels()) seen[static_cast<std::size_t>(l)] = 1;
    CHECK(seen == std::vector<int>{1, 1, 1});
}

TEST_CASE("kmeans: validation") {
    Matrix pts(2, 1, {0, 1});
    CHECK_THROWS_AS(kmeans(pts, 3, 1), validation_error);
    CHECK_THROWS_AS(kmeans(pts, 0, 1), validation_error);
}

TEST_CASE("agglomerative: points at 0, 1, 10 with single linkage") {
    auto tree = agglomerative(line_dists(), Linkage::single);
    REQUIRE(tree.merges.size() == 2);
    CHECK(tree.merges[0].left == 0);
    CHECK(tree.merges[0].right == 1);
    CHECK(tree.merges[0].height == 1.0);
    CHECK(tree.merges[0].id == 3);
    CHECK(tree.merges[1].left == 2);
    CHECK(tree.merges[1].right == 3);
    CHECK(tree.merges[1].height == 9.0);
    CHECK(tree.merges[1].id == 4);
}

TEST_CASE("agglomerative: identical points merge at height zero") {
    SymmetricMatrix d(2);
    auto tree = agglomerative(d, Linkage::average);
    CHECK(tree.merges[0].height == 0.0);
}

TEST_CASE("agglomerative: ties break toward the lowest pair") {
    SymmetricMatrix d(3); // equilateral
    d.set(0, 1, 1.0);
    d.set(1, 2, 1.0);
    d.set(0, 2, 1.0);
    auto tree = agglomerative(d, Linkage::complete);
    CHECK(tree.merges[0].left == 0);
    CHECK(tree.merges[0].right == 1);
}

TEST_CASE("agglomerative: matches the naive reference on random points") {
    for (Linkage linkage : {Linkage::single, Linkage::complete, Linkage::average}) {
        auto x = test::random_data(7, 3, 53);
        auto d = sqrt_distances(pairwise_sq_dists(x));
        auto fast = agglomerative(d, linkage);
        auto slow = naive_agglomerative(d, linkage);
        REQUIRE(fast.merges.size() == slow.merges.size());
        for (std::size_t t = 0; t < fast.merges.size(); ++t) {
            CHECK(fast.merges[t].left == slow.merges[t].left);
            CHECK(fast.merges[t].right == slow.merges[t].right);
            CHECK(fast.merges[t].id == slow.merges[t].id);
            CHECK(fast.merges[t].height ==
                  doctest::Approx(slow.merges[t].height).epsilon(1e-12));
        }
        for (std::size_t t = 1; t < fast.merges.size(); ++t)
            CHECK(fast.merges[t].height >= fast.merges[t - 1].height);
    }
}

TEST_CASE("agglomerative: rejects nonzero diagonals") {
    SymmetricMatrix d(2);
    d.set(1, 1, 0.5);
    CHECK_THROWS_AS(agglomerative(d, Linkage::single), validation_error);
}

TEST_CASE("cut_dendrogram: trivial cuts and the line example") {
    auto tree = agglomerative(line_dists(), Linkage::single);
    CHECK(cut_dendrogram(tree, 1).labels() == std::vector<int>{0, 0, 0});
    CHECK(cut_dendrogram(tree, 3).labels() == std::vector<int>{0, 1, 2});
    CHECK(cut_dendrogram(tree, 2).labels() == std::vector<int>{0, 0, 1});
    CHECK_THROWS_AS(cut_dendrogram(tree, 0), validation_error);
    CHECK_THROWS_AS(cut_dendrogram(tree, 4), validation_error);
}

TEST_CASE("sqrt_distances: elementwise root") {
    auto x = test::random_data(5, 4, 59);
    auto sq = pairwise_sq_dists(x);
    auto d = sqrt_distances(sq);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) CHECK(d(i, j) == std::sqrt(sq(i, j)));
}

TEST_CASE("well-separated blobs: all three methods agree with the truth") {
    for (std::uint64_t seed : {5, 6}) {
        auto [x, truth] = make_dense_sparse(test::wide_two_blob(seed));
        auto sq = pairwise_sq_dists(x);
        auto scan = epsilon_scan(sq);
        auto emb = diffusion_embed(gaussian_affinity(sq, select_epsilon(scan)));

        auto spectral = spectral_threshold(emb).partition;
        auto km = kmeans(x.matrix(), 2, seed, 10).partition;
        auto hier = cut_dendrogram(agglomerative(sqrt_distances(sq), Linkage::average), 2);

        CHECK(partitions_equal(spectral, km));
        CHECK(partitions_equal(spectral, hier));
        CHECK(partitions_equal(spectral, truth));
    }
}

} // TEST_SUITE
