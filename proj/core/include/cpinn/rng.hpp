#pragma once

#include <cstdint>
#include <random>

namespace cpinn {

/// Deterministic uniform generator. The mapping from raw mt19937_64 draws to
/// doubles is spelled out here instead of relying on std::uniform_real_distribution,
/// whose output is implementation-defined; identical seeds must reproduce
/// identical datasets and weights everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Box-Muller normal draw; consumes two uniforms.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace cpinn
