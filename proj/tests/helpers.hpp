#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dmc/matrix.hpp"
#include "dmc/synth.hpp"

namespace dmc::test {

//! n x p matrix of standard normal entries, deterministic per seed.
inline Matrix random_matrix(std::size_t n, std::size_t p, std::uint64_t seed) {
    NormalStream rng(seed);
    Matrix m(n, p);
    for (auto& v : m.data()) v = rng.next();
    return m;
}

inline DataMatrix random_data(std::size_t n, std::size_t p, std::uint64_t seed) {
    return DataMatrix(random_matrix(n, p, seed));
}

//! Random symmetric matrix with normal entries.
inline SymmetricMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
    NormalStream rng(seed);
    SymmetricMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a.set(i, j, rng.next());
    return a;
}

//! Fresh scratch directory under the system temp root, removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("dmc_test_" + tag + "_" + std::to_string(counter_++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

//! Two-cluster instance whose distance scales overlap, so the weight-sum
//! curve is a single S with one slope peak (the shape the selection rule's
//! slope guarantee applies to).
inline SynthSpec mild_two_blob(std::uint64_t seed) {
    SynthSpec spec;
    spec.n_dense = 8;
    spec.n_sparse = 7;
    spec.p = 50;
    spec.dense_spread = 1.0;
    spec.sparse_spread = 2.0;
    spec.separation = 3.0;
    spec.seed = seed;
    return spec;
}

//! Strongly separated two-cluster instance: one embedding dimension carries
//! the whole structure and every clusterer recovers the planted labels.
inline SynthSpec wide_two_blob(std::uint64_t seed) {
    SynthSpec spec;
    spec.n_dense = 8;
    spec.n_sparse = 7;
    spec.p = 30;
    spec.dense_spread = 1.0;
    spec.sparse_spread = 1.5;
    spec.separation = 30.0;
    spec.seed = seed;
    return spec;
}

} // namespace dmc::test
