#include "dmc/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dmc/error.hpp"

namespace dmc {

std::uint64_t NormalStream::next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double NormalStream::next_uniform() {
    // (z >> 11) is uniform on [0, 2^53); +1 keeps the draw in (0, 1] so
    // ln(u) below is always finite.
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(angle);
    has_cached_ = true;
    return r * std::cos(angle);
}

SynthSpec paper_preset(std::uint64_t seed) {
    SynthSpec spec;
    spec.seed = seed;
    return spec;
}

namespace {

void validate(const SynthSpec& spec) {
    if (spec.n_dense < 1 || spec.n_sparse < 1)
        throw validation_error("synth: both clusters need at least one sample");
    if (spec.n_dense + spec.n_sparse < 4)
        throw validation_error("synth: need at least 4 samples total");
    if (spec.p < 1) throw validation_error("synth: need at least 1 feature");
    if (!(spec.dense_spread > 0.0) || !(spec.sparse_spread > 0.0))
        throw validation_error("synth: spreads must be positive");
    if (spec.dense_spread > spec.sparse_spread)
        throw validation_error("synth: dense_spread must not exceed sparse_spread");
    if (!(spec.separation >= 0.0)) throw validation_error("synth: separation must be >= 0");
}

//! Two orthonormal direction vectors from the stream (Gram-Schmidt on two
//! Gaussian draws). For p == 1 orthogonality is impossible; falls back to
//! +1/-1 so the centers still end up `separation` apart.
void draw_directions(NormalStream& rng, std::size_t p, std::vector<double>& u1,
                     std::vector<double>& u2) {
    u1.resize(p);
    u2.resize(p);
    double norm1 = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        u1[k] = rng.next();
        norm1 += u1[k] * u1[k];
    }
    norm1 = std::sqrt(norm1);
    for (std::size_t k = 0; k < p; ++k) u1[k] /= norm1;

    double dot = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        u2[k] = rng.next();
        dot += u2[k] * u1[k];
    }
    double norm2 = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        u2[k] -= dot * u1[k];
        norm2 += u2[k] * u2[k];
    }
    norm2 = std::sqrt(norm2);
    if (norm2 < 1e-12) {
        // p == 1 (or a degenerate draw): use opposite signs along u1.
        for (std::size_t k = 0; k < p; ++k) u2[k] = -u1[k];
        return;
    }
    for (std::size_t k = 0; k < p; ++k) u2[k] /= norm2;
}

} // namespace

std::pair<DataMatrix, Partition> make_dense_sparse(const SynthSpec& spec) {
    validate(spec);
    const std::size_t n = spec.n_dense + spec.n_sparse;
    const std::size_t p = spec.p;
    NormalStream rng(spec.seed);

    std::vector<double> u1, u2;
    draw_directions(rng, p, u1, u2);
    const double center_norm = spec.separation / std::numbers::sqrt2;

    Matrix rows(n, p);
    std::vector<int> labels(n, 0);
    const double inv_sqrt_p = 1.0 / std::sqrt(static_cast<double>(p));
    for (std::size_t i = 0; i < n; ++i) {
        const bool dense = i < spec.n_dense;
        labels[i] = dense ? 0 : 1;
        const std::vector<double>& dir = dense ? u1 : u2;
        const double sigma = (dense ? spec.dense_spread : spec.sparse_spread) * inv_sqrt_p;
        for (std::size_t k = 0; k < p; ++k)
            rows(i, k) = center_norm * dir[k] + sigma * rng.next();
    }

    // Fisher-Yates shuffle driven by the same stream.
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(i + 1));
        std::swap(perm[i], perm[j > i ? i : j]);
    }

    Matrix shuffled(n, p);
    std::vector<int> shuffled_labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = perm[i];
        auto dst = shuffled.row(i);
        auto s = rows.row(src);
        for (std::size_t k = 0; k < p; ++k) dst[k] = s[k];
        shuffled_labels[i] = labels[src];
    }

    return {DataMatrix(std::move(shuffled)), Partition(std::move(shuffled_labels), 2)};
}

} // namespace dmc
