#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mic {

inline constexpr std::uint64_t default_seed = 0x5EED2024ULL;

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent generator for one stream (cell, worker, trial) of a master seed.
inline Rng substream(std::uint64_t master, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(master)),
                      static_cast<std::uint32_t>(splitmix64(master) >> 32),
                      static_cast<std::uint32_t>(splitmix64(master ^ splitmix64(stream + 1))),
                      static_cast<std::uint32_t>(splitmix64(stream) >> 32)};
    return Rng(seq);
}

// Distributions written out so streams are identical across standard libraries.
inline double uniform01(Rng& rng) { return (rng() >> 11) * 0x1.0p-53; }

inline double standard_normal(Rng& rng) {
    // Marsaglia polar method, one value per call
    for (;;) {
        const double u = 2 * uniform01(rng) - 1;
        const double v = 2 * uniform01(rng) - 1;
        const double s = u * u + v * v;
        if (s > 0 && s < 1) return u * std::sqrt(-2 * std::log(s) / s);
    }
}

} // namespace mic
