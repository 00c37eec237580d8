#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "dmc/error.hpp"
#include "dmc/synth.hpp"
#include "helpers.hpp"

using namespace dmc;

namespace {

//! The published splitmix64 step, written out independently of the library.
struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        s += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

struct DistanceMeans {
    double within_dense = 0.0;
    double within_sparse = 0.0;
    double cross = 0.0;
};

DistanceMeans pairwise_means(const DataMatrix& x, const Partition& truth) {
    DistanceMeans m;
    std::size_t nd = 0, ns = 0, nc = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = i + 1; j < x.rows(); ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) {
                const double diff = x(i, k) - x(j, k);
                d2 += diff * diff;
            }
            const double d = std::sqrt(d2);
            if (truth[i] == 0 && truth[j] == 0) {
                m.within_dense += d;
                ++nd;
            } else if (truth[i] == 1 && truth[j] == 1) {
                m.within_sparse += d;
                ++ns;
            } else {
                m.cross += d;
                ++nc;
            }
        }
    m.within_dense /= static_cast<double>(nd);
    m.within_sparse /= static_cast<double>(ns);
    m.cross /= static_cast<double>(nc);
    return m;
}

} // namespace

TEST_SUITE("synth") {

TEST_CASE("rng: raw words follow splitmix64") {
    for (std::uint64_t seed : {0ull, 42ull, 0xDEADBEEFull}) {
        NormalStream stream(seed);
        SplitMix oracle{seed};
        for (int t = 0; t < 1000; ++t) CHECK(stream.next_u64() == oracle.next());
    }
}

TEST_CASE("rng: same seed gives the identical stream") {
    NormalStream a(7), b(7);
    for (int t = 0; t < 1000000; ++t)
        if (a.next() != b.next()) {
            FAIL("streams diverged at draw ", t);
            break;
        }
}

TEST_CASE("rng: different seeds diverge") {
    NormalStream a(1), b(2);
    bool any_different = false;
    for (int t = 0; t < 1000; ++t) any_different |= (a.next() != b.next());
    CHECK(any_different);
}

TEST_CASE("rng: uniforms live in (0, 1]") {
    NormalStream rng(3);
    for (int t = 0; t < 10000; ++t) {
        const double u = rng.next_uniform();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("rng: normal moments over a million draws") {
    NormalStream rng(12345);
    double sum = 0.0, sum2 = 0.0;
    const int n = 1000000;
    for (int t = 0; t < n; ++t) {
        const double v = rng.next();
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.005);
    CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("rng: box-muller pair matches the direct formula") {
    NormalStream stream(99);
    SplitMix oracle{99};
    const double u1 = (static_cast<double>(oracle.next() >> 11) + 1.0) * 0x1p-53;
    const double u2 = (static_cast<double>(oracle.next() >> 11) + 1.0) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 2.0 * std::acos(-1.0);
    CHECK(stream.next() == r * std::cos(two_pi * u2));
    CHECK(stream.next() == r * std::sin(two_pi * u2));
}

TEST_CASE("make_dense_sparse: bit-identical per spec") {
    auto spec = test::mild_two_blob(77);
    auto [x1, t1] = make_dense_sparse(spec);
    auto [x2, t2] = make_dense_sparse(spec);
    CHECK(x1.matrix() == x2.matrix());
    CHECK(t1.labels() == t2.labels());
    CHECK(std::memcmp(x1.matrix().data().data(), x2.matrix().data().data(),
                      x1.rows() * x1.cols() * sizeof(double)) == 0);
}

TEST_CASE("make_dense_sparse: degenerate control still has valid shape") {
    SynthSpec spec;
    spec.n_dense = 5;
    spec.n_sparse = 5;
    spec.p = 20;
    spec.dense_spread = 1.0;
    spec.sparse_spread = 1.0;
    spec.separation = 0.0;
    spec.seed = 4;
    auto [x, truth] = make_dense_sparse(spec);
    CHECK(x.rows() == 10);
    CHECK(x.cols() == 20);
    CHECK(x.matrix().all_finite());
    CHECK(truth.members(0).size() == 5);
    CHECK(truth.members(1).size() == 5);
}

TEST_CASE("make_dense_sparse: preset distance ordering") {
    auto [x, truth] = make_dense_sparse(paper_preset());
    CHECK(x.rows() == 23);
    CHECK(x.cols() == 5000);
    CHECK(truth.members(0).size() == 12);
    CHECK(truth.members(1).size() == 11);

    auto m = pairwise_means(x, truth);
    CHECK(m.within_dense < m.within_sparse);
    CHECK(m.within_sparse < m.cross);
}

TEST_CASE("make_dense_sparse: spread controls the cloud radius") {
    SynthSpec spec = test::wide_two_blob(31);
    spec.p = 400;
    auto [x, truth] = make_dense_sparse(spec);
    auto m = pairwise_means(x, truth);
    // mean pairwise distance within a cloud of RMS radius r is ~ r*sqrt(2)
    CHECK(m.within_dense ==
          doctest::Approx(spec.dense_spread * std::sqrt(2.0)).epsilon(0.1));
    CHECK(m.within_sparse ==
          doctest::Approx(spec.sparse_spread * std::sqrt(2.0)).epsilon(0.1));
    CHECK(m.cross == doctest::Approx(spec.separation).epsilon(0.1));
}

TEST_CASE("make_dense_sparse: validation") {
    SynthSpec bad;
    bad.n_dense = 2;
    bad.n_sparse = 1; // fewer than 4 samples total
    CHECK_THROWS_AS(make_dense_sparse(bad), validation_error);

    SynthSpec inverted = test::mild_two_blob(1);
    inverted.dense_spread = 3.0;
    inverted.sparse_spread = 1.0;
    CHECK_THROWS_AS(make_dense_sparse(inverted), validation_error);
}

TEST_CASE("paper_preset: pinned fields") {
    auto spec = paper_preset(9);
    CHECK(spec.n_dense == 12);
    CHECK(spec.n_sparse == 11);
    CHECK(spec.p == 5000);
    CHECK(spec.dense_spread == 1.0);
    CHECK(spec.sparse_spread == 3.0);
    CHECK(spec.separation == 50.0);
    CHECK(spec.seed == 9);
}

} // TEST_SUITE
