#pragma once

#include <cstdint>

namespace hitr::detail {

// splitmix64: portable 64-bit generator with a one-word state. Every
// random draw in the library flows through this so output bytes do not
// depend on the platform's standard-library distributions.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform index in [0, n) via the high bits of a 128-bit product.
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Fair sign.
    double next_sign() { return (next() & 1ULL) ? 1.0 : -1.0; }
};

} // namespace hitr::detail
