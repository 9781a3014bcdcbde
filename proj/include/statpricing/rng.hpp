#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace statpricing {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Stream key for (seed, i, j, ...): each index is folded in through splitmix64.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t key = splitmix64(seed);
    for (std::uint64_t part : path) key = splitmix64(key ^ splitmix64(part + 0x632BE59BD9B4E019ull));
    return key;
}

/**
 * Seeded random source. Uniforms are built from the top 53 bits of a
 * mt19937_64 draw and exponentials by inversion, so a given seed produces the
 * same stream on every platform.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
    /// Uniform index in [0, n).
    std::uint64_t index(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

private:
    std::mt19937_64 engine_;
};

}  // namespace statpricing
