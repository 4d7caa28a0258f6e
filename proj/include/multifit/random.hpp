#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace multifit {

/// All seeded randomness flows through std::mt19937_64, whose output
/// sequence is pinned by the standard, and through the rejection mapping
/// below, so identical seeds reproduce identical draws on every platform
/// (std::uniform_int_distribution makes no such promise).
using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection; unbiased and portable.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

/// Standard normal via Box-Muller on the portable uniform source.
inline double normal_unit(Rng& rng) {
    for (;;) {
        const double u1 = uniform_unit(rng);
        if (u1 <= 0.0) continue;
        const double u2 = uniform_unit(rng);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }
}

}  // namespace multifit
