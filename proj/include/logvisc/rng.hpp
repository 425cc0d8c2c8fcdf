// Deterministic pseudo-random numbers for initial data and property tests.
#pragma once

#include <cstdint>

namespace logvisc {

/// 64-bit linear congruential generator, x <- a*x + c mod 2^64, with the
/// multiplier/increment pair from Knuth's MMIX:
///   a = 6364136223846793005,  c = 1442695040888963407.
/// Chosen so that every sampled initial condition and every randomized check
/// is reproducible from a single seed across platforms.  Doubles are formed
/// from the top 53 bits of the state.
struct Lcg64 {
    std::uint64_t state;

    static constexpr std::uint64_t mult = 6364136223846793005ULL;
    static constexpr std::uint64_t incr = 1442695040888963407ULL;

    explicit Lcg64(std::uint64_t seed = 12345) : state(seed) {}

    std::uint64_t next_u64() {
        state = state * mult + incr;
        return state;
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }
};

} // namespace logvisc
