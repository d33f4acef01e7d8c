#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "arw/curve.hpp"
#include "arw/lattice.hpp"

namespace arw {

/// One draw of Fourier coefficients on the half lattice; the full map is
/// implied by a_{-lambda} = conj(a_lambda).
struct WaveSample {
    const EnergyLevel* level = nullptr;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::vector<std::complex<double>> coeffs;  // one per half point
};

WaveSample sample_coefficients(const EnergyLevel& level, std::uint64_t seed,
                               std::uint64_t trial);

/// T_n at an arbitrary torus point.
double evaluate_wave(const WaveSample& sample, const Vec2& x);

/// f_n(t) = T_n(gamma(t)) and f'_n(t) on a uniform grid, plus enough state
/// for pointwise re-evaluation during zero refinement.
struct RestrictedProcess {
    const EnergyLevel* level = nullptr;
    const UnitSpeedCurve* curve = nullptr;
    std::vector<std::complex<double>> coeffs;
    std::vector<double> t, f, fp;

    double eval(double t) const;
    double eval_deriv(double t) const;
};

/// Sample-independent grid tables for fast per-trial realization: cos/sin of
/// the phases 2 pi <lambda, gamma(t_i)> and the derivative factors
/// 2 pi <lambda, gamma'(t_i)>, per half-lattice point.
class RestrictedGrid {
public:
    RestrictedGrid(const EnergyLevel& level, const UnitSpeedCurve& curve,
                   double samples_per_wavelength);

    RestrictedProcess realize(const WaveSample& sample) const;

    const std::vector<double>& grid() const { return t_; }
    double samples_per_wavelength() const { return spw_; }

private:
    const EnergyLevel* level_;
    const UnitSpeedCurve* curve_;
    double spw_;
    std::vector<double> t_;
    std::size_t half_ = 0;
    // row-major [node][half point]
    std::vector<double> cos_, sin_, dphase_;
};

/// Convenience wrapper: builds a grid and realizes one sample.
RestrictedProcess evaluate_restricted(const WaveSample& sample, const UnitSpeedCurve& curve,
                                      double samples_per_wavelength);

struct CovarianceBundle {
    double r = 0.0, r1 = 0.0, r2 = 0.0, r12 = 0.0;
};

/// Exact restricted covariance r(t1,t2) and its derivatives.
CovarianceBundle covariance_bundle(const EnergyLevel& level, const UnitSpeedCurve& curve,
                                   double t1, double t2);

}  // namespace arw
