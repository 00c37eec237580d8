#pragma once

#include <cstdint>
#include <utility>

#include "dmc/clustering.hpp"
#include "dmc/matrix.hpp"

namespace dmc {

//! Deterministic stream of standard normal values, identical on every
//! platform with the same IEEE-754 doubles and libm.
//!
//! Construction: the raw 64-bit sequence is splitmix64 over the seed,
//!     z_{i}: s += 0x9E3779B97F4A7C15; z = s;
//!            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//!            z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
//!            z ^= (z >> 31);
//! uniforms are u = ((z >> 11) + 1) * 2^-53 in (0, 1], and normals come from
//! the Box-Muller transform on consecutive uniform pairs (u1, u2):
//!     r = sqrt(-2 ln u1), n0 = r cos(2 pi u2), n1 = r sin(2 pi u2).
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : state_(seed) {}

    //! Next raw 64-bit word of the underlying splitmix64 sequence.
    std::uint64_t next_u64();
    //! Next uniform draw in (0, 1].
    double next_uniform();
    //! Next standard normal draw.
    double next();

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

//! Parameters of the planted dense/sparse two-cluster dataset. Spreads are
//! cloud radii: the RMS distance of a sample from its cluster center equals
//! the spread (per-coordinate noise std is spread / sqrt(p)).
struct SynthSpec {
    std::size_t n_dense = 12;
    std::size_t n_sparse = 11;
    std::size_t p = 5000;
    double dense_spread = 1.0;
    double sparse_spread = 3.0;
    double separation = 50.0;
    std::uint64_t seed = 42;
};

//! Desk-scale stand-in for the target regime (tens of samples, features
//! outnumbering them by orders of magnitude): n = 12 + 11 samples,
//! p = 5000 features, well separated dense and sparse clusters.
SynthSpec paper_preset(std::uint64_t seed = 42);

//! Generates the two-cluster dataset: cluster centers are two orthonormal
//! directions scaled to separation/sqrt(2) each (so the centers are exactly
//! `separation` apart and carry feature-wise structure), plus isotropic
//! Gaussian noise of the given spread. Rows are shuffled deterministically
//! by the seed; the returned partition is the planted ground truth
//! (label 0 = dense, label 1 = sparse).
std::pair<DataMatrix, Partition> make_dense_sparse(const SynthSpec& spec);

} // namespace dmc
