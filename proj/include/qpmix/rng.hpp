#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qpmix {

/// 64-bit SplitMix finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derived stream seed: h0 = splitmix64(master), h_{k+1} = splitmix64(h_k ^ key_k).
/// Every parallel task seeds its own generator through this function so results
/// do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t k : keys) h = splitmix64(h ^ k);
    return h;
}

/// Random stream used everywhere in the library.
///
/// Algorithm identity (stable across platforms and versions):
///   - engine: std::mt19937_64 (MT19937-64, fully specified by the C++ standard),
///     seeded with the single 64-bit seed;
///   - uniform(): top 53 bits of one engine output times 2^-53, in [0, 1);
///   - uniform_int(n): rejection sampling on the full 64-bit output (no modulo bias);
///   - normal(): Box-Muller polar-free form, both variates used in order:
///     r = sqrt(-2 ln(1 - u1)), z1 = r cos(2 pi u2), z2 = r sin(2 pi u2).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace qpmix
