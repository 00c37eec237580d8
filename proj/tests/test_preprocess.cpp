#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "dmc/error.hpp"
#include "dmc/preprocess.hpp"
#include "helpers.hpp"

using namespace dmc;

namespace {

//! Textbook Pearson with population moments, written independently.
double naive_abs_pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return std::abs(cov / std::sqrt(va * vb));
}

} // namespace

TEST_SUITE("preprocess") {

TEST_CASE("signed_log: fixed point and analytic values") {
    CHECK(signed_log(0.0) == 0.0);
    const double e1 = std::exp(1.0) - 1.0;
    CHECK(signed_log(e1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(signed_log(-e1) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("signed_log: monotone over random pairs") {
    NormalStream rng(21);
    for (int t = 0; t < 10000; ++t) {
        const double a = 100.0 * rng.next();
        const double b = 100.0 * rng.next();
        if (a < b) CHECK(signed_log(a) < signed_log(b));
        if (a > b) CHECK(signed_log(a) > signed_log(b));
    }
}

TEST_CASE("signed_log: inverse round-trips") {
    NormalStream rng(22);
    for (int t = 0; t < 1000; ++t) {
        const double x = std::exp(10.0 * rng.next()) * (t % 2 ? 1.0 : -1.0);
        const double back = signed_log_inverse(signed_log(x));
        CHECK(back == doctest::Approx(x).epsilon(1e-10));
    }
}

TEST_CASE("signed_log_normalize: shape preserved, elementwise") {
    auto x = test::random_data(3, 5, 4);
    auto y = signed_log_normalize(x);
    CHECK(y.rows() == 3);
    CHECK(y.cols() == 5);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 5; ++j) CHECK(y(i, j) == signed_log(x(i, j)));
}

TEST_CASE("correlation_matrix: self and negation") {
    DataMatrix x(2, 4, {1, 2, 3, 4, -1, -2, -3, -4});
    auto c = correlation_matrix(x);
    CHECK(c(0, 0) == 1.0);
    CHECK(c(1, 1) == 1.0);
    CHECK(c(0, 1) == doctest::Approx(1.0).epsilon(1e-14)); // |corr| of a negated row
}

TEST_CASE("correlation_matrix: naive oracle, 4x50") {
    auto x = test::random_data(4, 50, 3);
    auto c = correlation_matrix(x);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(c(i, j) == doctest::Approx(naive_abs_pearson(x.row(i), x.row(j))).epsilon(1e-12));
            CHECK(c(i, j) >= 0.0);
            CHECK(c(i, j) <= 1.0);
            CHECK(c(i, j) == c(j, i));
        }
}

TEST_CASE("correlation_matrix: zero-variance row names the row") {
    DataMatrix x(3, 3, {1, 2, 3, 5, 5, 5, 0, 1, 0});
    CHECK_THROWS_WITH_AS(correlation_matrix(x), doctest::Contains("row 1"), validation_error);
}

TEST_CASE("correlation_matrix: invariant under per-row affine maps") {
    auto x = test::random_data(4, 30, 8);
    Matrix scaled = x.matrix();
    const double a[] = {2.0, -0.5, 10.0, -3.0};
    const double b[] = {1.0, 0.0, -7.0, 2.5};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 30; ++j) scaled(i, j) = a[i] * scaled(i, j) + b[i];
    auto c0 = correlation_matrix(x);
    auto c1 = correlation_matrix(DataMatrix(std::move(scaled)));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(c1(i, j) == doctest::Approx(c0(i, j)).epsilon(1e-12));
}

TEST_CASE("salient_mask: constant vector degenerates") {
    std::vector<double> x(10, 3.14);
    auto m = salient_mask(x);
    CHECK(m.degenerate);
    CHECK(m.count() == 0);
}

TEST_CASE("salient_mask: strict 3-sigma boundary") {
    // mean 10, population sigma 30: the outlier sits exactly at z = 3
    std::vector<double> x(10, 0.0);
    x[9] = 100.0;
    auto at3 = salient_mask(x);
    CHECK(!at3.degenerate);
    CHECK(at3.count() == 0);

    auto below = salient_mask(x, 2.9);
    CHECK(below.count() == 1);
    CHECK(below.mask[9] == 1);
}

TEST_CASE("salient_mask: affine invariance of the flagged set") {
    NormalStream rng(17);
    std::vector<double> x(64);
    for (auto& v : x) v = rng.next();
    x[5] = 40.0; // make one clear outlier
    auto base = salient_mask(x);
    CHECK(base.count() >= 1);

    std::vector<double> y(64);
    for (std::size_t i = 0; i < 64; ++i) y[i] = -2.5 * x[i] + 7.0;
    auto mapped = salient_mask(y);
    CHECK(mapped.mask == base.mask);
}

} // TEST_SUITE
