#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace arw {

/// Counter-based Gaussian stream keyed by (seed, stream id).
///
/// Trials of a Monte Carlo campaign use stream id = trial index, so every
/// trial is a pure function of (seed, trial) and campaigns are reproducible
/// under any execution order. The generator is splitmix64 on a per-stream
/// state; normals come from Box-Muller on explicitly constructed uniforms,
/// which keeps the byte stream identical across platforms (std
/// distributions are implementation-defined).
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream) {
        state_ = mix(seed + 0x9e3779b97f4a7c15ULL);
        state_ ^= mix(stream + 0xbf58476d1ce4e5b9ULL);
        // decorrelate nearby (seed, stream) pairs
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in (0, 1].
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal.
    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        double u2 = next_unit();
        double rad = std::sqrt(-2.0 * std::log(u1));
        double ang = 6.283185307179586476925286766559 * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

    /// Standard complex Gaussian: E|a|^2 = 1, independent re/im ~ N(0, 1/2).
    std::complex<double> next_complex() {
        constexpr double half = 0.70710678118654752440;  // sqrt(1/2)
        double re = half * next();
        double im = half * next();
        return {re, im};
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace arw
