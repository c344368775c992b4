#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace teamdims {

// All randomized stages (split shuffling, synthesis, forest bootstraps,
// weight init) run on std::mt19937_64, whose output sequence is pinned by the
// C++ standard, combined with the explicit draws below. std::*_distribution
// is deliberately avoided: its mapping from engine output to values is
// implementation-defined and would break cross-toolchain reproducibility.

using Rng = std::mt19937_64;

// Derives an independent seed for a named substream (per dimension, per tree,
// per stage) so retraining one stream never perturbs another.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Bounded draw by modulo. The bias for our bounds (tens of thousands at most)
// is far below anything observable and the mapping is fully specified.
inline std::uint64_t draw(Rng& rng, std::uint64_t bound) {
    return bound == 0 ? 0 : rng() % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit_real(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller. Two engine draws per call, no cached spare, so the stream
// position is predictable.
inline double normal(Rng& rng, double mean = 0.0, double stddev = 1.0) {
    double u1 = unit_real(rng);
    double u2 = unit_real(rng);
    if (u1 < 1e-300) u1 = 1e-300;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + stddev * z;
}

// Fisher-Yates with the modulo draw above.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(draw(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace teamdims
