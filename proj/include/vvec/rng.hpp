#pragma once

#include <cmath>
#include <cstdint>

namespace vvec {

// Counter-based hash RNG. Every sample is addressed by (seed, stream, index),
// so noise fields are reproducible independent of evaluation order and
// thread count.
inline uint64_t hash_mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t seed, uint64_t stream, uint64_t index) {
    return hash_mix(hash_mix(seed ^ (stream * 0xd1342543de82ef95ULL)) ^ index);
}

// Uniform in [0, 1).
inline double hash_uniform(uint64_t seed, uint64_t stream, uint64_t index) {
    return static_cast<double>(hash_combine(seed, stream, index) >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two hashed uniforms.
inline double hash_normal(uint64_t seed, uint64_t stream, uint64_t index) {
    double u1 = hash_uniform(seed, stream, 2 * index);
    double u2 = hash_uniform(seed, stream, 2 * index + 1);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace vvec
