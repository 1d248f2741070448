#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace stnn {

// Distribution helpers built from raw engine bits so that seeded runs
// reproduce across standard-library implementations.

inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

/// Uniform integer in [lo, hi], inclusive.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t count = hi - lo + 1;
    return lo + static_cast<std::uint64_t>(uniform01(g) * static_cast<double>(count)) % count;
}

/// Standard normal draw (Box-Muller, cosine branch).
inline double gaussian(std::mt19937_64& g) {
    const double u1 = 1.0 - uniform01(g);  // (0, 1]
    const double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace stnn
