#pragma once

#include <cstdint>

namespace mginf {

// SplitMix64 finalizer: a well-mixed bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed for an independent substream indexed by (seed, index): replication r
// always uses the same stream no matter which worker runs it or in what
// order, which is what makes simulation results independent of thread count.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
inline double to_unit_interval(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace mginf
