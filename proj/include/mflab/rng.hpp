#pragma once

#include <cstdint>

namespace mflab {

// Counter-based generator: one SplitMix64-style finalization of the cell key.
// Draws depend only on (seed, j, k), so generation order and threading are
// irrelevant to the output.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
    return z ^ (z >> 31);
}

inline std::uint64_t cell_hash(std::uint64_t seed, int j, std::uint64_t k) {
    std::uint64_t key = (std::uint64_t(std::uint32_t(j)) << 58) ^ k;
    std::uint64_t z = seed + UINT64_C(0x9E3779B97F4A7C15) * (key + 1);
    return mix64(mix64(z) ^ seed);
}

// P(true) = min(p, 1). Uses the top 53 bits as a uniform in [0,1).
inline bool cell_bernoulli(std::uint64_t seed, int j, std::uint64_t k, double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    double u = double(cell_hash(seed, j, k) >> 11) * 0x1.0p-53;
    return u < p;
}

}  // namespace mflab
