#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace parframe::rng {

/// 64-bit mix of a seed and a stream index (splitmix64 finalizer). Child
/// streams derived this way are independent of iteration order, which is what
/// makes per-point / per-cell parallelism reproducible.
constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix(mix(seed, a), b);
}

constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
    return mix(mix(mix(seed, a), b), c);
}

/// Deterministic scalar source: a seeded mt19937_64 with uniform doubles and
/// Box-Muller gaussians. The engine is bit-specified by the standard, so the
/// stream is identical across platforms for a fixed seed.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; two variates per transform, one cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    /// Identifier of the gaussian transform, recorded in report headers.
    static const char* gaussian_transform_id() { return "mt19937_64/box-muller"; }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace parframe::rng
