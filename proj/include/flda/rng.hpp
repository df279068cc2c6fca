#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace flda {

// Counter-based deterministic random generation: a value is a pure
// function of (seed, indices), so draws are reproducible regardless of
// evaluation order or thread count.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t seed, uint64_t v) {
    return splitmix64(seed ^ splitmix64(v));
}

// Uniform in (0, 1); never returns 0 or 1.
inline double counter_uniform(uint64_t key) {
    const uint64_t bits = splitmix64(key);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller from two decorrelated uniforms.
inline double counter_normal(uint64_t key) {
    const double u1 = counter_uniform(hash_combine(key, 0x517cc1b727220a95ULL));
    const double u2 = counter_uniform(hash_combine(key, 0x2545f4914f6cdd1dULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Keyed draw for a tuple of indices.
inline uint64_t draw_key(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0,
                         uint64_t d = 0) {
    uint64_t k = splitmix64(seed);
    k = hash_combine(k, a);
    k = hash_combine(k, b);
    k = hash_combine(k, c);
    k = hash_combine(k, d);
    return k;
}

}  // namespace flda
