#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "arw/common.hpp"

namespace arw {

struct LatticePoint {
    long long x = 0;
    long long y = 0;
};

/// An admissible energy level: all lattice points of squared norm n, sorted
/// by angle in [0, 2pi), plus the half set used for real-wave sampling.
/// The half set is {y > 0}, extended by (sqrt(n), 0) when n is a perfect
/// square, so that points = half_points  ∪ (-half_points) disjointly.
struct EnergyLevel {
    long long n = 0;
    double eigenvalue = 0.0;  // 4 pi^2 n
    std::vector<LatticePoint> points;
    std::vector<LatticePoint> half_points;
    int count = 0;  // |points|

    std::vector<double> angles;       // of points, in [0, 2pi)
    std::vector<double> half_angles;  // of half_points

    double alpha() const;  // Var(f'_n) = 2 pi^2 n
};

/// kind of angular measure on the unit circle
enum class MeasureKind { Atomic, Uniform, Cilleruelo, TiltedCilleruelo };

struct SpectralMeasure {
    MeasureKind kind = MeasureKind::Uniform;
    std::vector<double> angles;   // atomic support (empty for uniform)
    std::vector<double> weights;  // same length as angles
    std::complex<double> fourth_coefficient{0.0, 0.0};  // cached mu_hat(4)

    static SpectralMeasure uniform();
    static SpectralMeasure cilleruelo();
    static SpectralMeasure tilted_cilleruelo();
    static SpectralMeasure from_level(const EnergyLevel& level);
    static SpectralMeasure atomic(std::vector<double> angles, std::vector<double> weights);
};

bool is_representable(long long n);

/// Throws NotRepresentable if n is not a sum of two squares.
EnergyLevel enumerate_level(long long n);

SpectralMeasure spectral_measure(const EnergyLevel& level);

std::complex<double> mu_hat(const SpectralMeasure& measure, int k);

struct SeparationStats {
    double min_sep = 0.0;
    bool is_delta_separated = false;  // min_sep >= n^(1/4 + delta), constant 1
};

SeparationStats separation_stats(const EnergyLevel& level, double delta);

/// Number of ordered tuples in Lambda_n^order summing to zero (order 4 or 6),
/// via hashing of partial sums. Throws LevelTooLarge above the cap.
long long spectral_correlations(const EnergyLevel& level, int order, int max_count = 64);

struct OffdiagonalSums {
    double min_nonzero_norm = 0.0;
    double reciprocal_sum = 0.0;  // normalized by N^2 (order 4) or N^4 (order 6)
};

OffdiagonalSums offdiagonal_sums(const EnergyLevel& level, int order, int max_count = 64);

/// (1/N) sum <z, lambda/|lambda|>^2 - |z|^2 / 2; zero to machine precision.
double direction_identity_check(const EnergyLevel& level, const Vec2& z);

}  // namespace arw
