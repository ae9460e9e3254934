#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace corpusfit {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream seed for (seed, index). Used everywhere work fans out
// (documents, MC iterations, bootstrap reps) so results do not depend on
// worker count or execution order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ed2701a3c5e491ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t index = 0) {
    return Rng(derive_seed(seed, index));
}

// Uniform in [0,1) built from the raw 64-bit output; avoids the
// implementation-defined behavior of std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index into an (approximately normalized) probability vector.
std::int64_t draw_categorical(Rng& rng, std::span<const double> probs);

// Index i such that cum[i-1] <= u < cum[i], by binary search. cum must be
// nondecreasing with cum.back() ~ 1.
std::int64_t draw_index_from_cdf(std::span<const double> cum, double u);

// Exact single-variate samplers via mode-centered inverse-cdf walks. All are
// deterministic functions of the engine state (one uniform draw each).
std::int64_t draw_binomial(Rng& rng, std::int64_t n, double p);
std::int64_t draw_hypergeometric(Rng& rng, std::int64_t total, std::int64_t marked, std::int64_t draws);
std::int64_t draw_poisson(Rng& rng, double lambda);

} // namespace corpusfit
