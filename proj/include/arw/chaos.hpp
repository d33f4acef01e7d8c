#pragma once

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <vector>

#include "arw/curve.hpp"
#include "arw/field.hpp"
#include "arw/lattice.hpp"
#include "arw/rng.hpp"

namespace arw {

/// Probabilists' Hermite polynomial H_k(x).
double hermite(int k, double x);

/// Expansion coefficients of the Dirac delta (b) and the absolute value (a)
/// in the Hermite basis: b_{2q} = H_{2q}(0) / ((2q)! sqrt(2 pi)),
/// a_{2l} = sqrt(2/pi) (-1)^{l+1} / (2^l l! (2l-1)).
struct ChaosCoefficients {
    std::vector<double> b;  // b[q] = b_{2q}
    std::vector<double> a;  // a[l] = a_{2l}
};

ChaosCoefficients chaos_coefficients(int max_q);

struct Projection2 {
    double z2a = 0.0;
    double z2b = 0.0;
};

struct WFunctionals {
    double W1 = 0.0;
    double int_W2 = 0.0;
    double identity_residual = 0.0;  // (1/L) int W2 - W1
    std::vector<double> W2_profile;  // at curve quad nodes (level 0)
};

struct Projection4 {
    double z4a = 0.0;          // X/Y/Z route
    double z4a_static = 0.0;   // -int (W2 - mean)^2 route (static curves)
};

/// Precomputes the per-(level, curve) geometry so that per-sample chaos
/// projections cost O(N^2). All members are immutable after construction.
class ChaosProjector {
public:
    ChaosProjector(const EnergyLevel& level, const UnitSpeedCurve& curve);

    Projection2 project_2(const WaveSample& sample) const;
    WFunctionals W_functionals(const WaveSample& sample, bool with_profile = false) const;

    /// Computes both fourth-chaos routes. When the curve is static and the
    /// routes differ by more than route_tol (relative), throws
    /// RouteDisagreement.
    Projection4 project_4(const WaveSample& sample, double route_tol = 1e-8) const;

    double z0() const { return z0_; }  // sqrt(2 n) L, deterministic
    double predicted_var_z2a() const;  // (n/N)(4B - L^2)
    double predicted_var_z4a() const;  // (n/4N^2)(16A + 24B - 7L^2)
    double B_mu() const { return B_; }
    double A_mu() const { return A_; }
    double F_mu() const { return F_; }

    const EnergyLevel& level() const { return *level_; }
    const UnitSpeedCurve& curve() const { return *curve_; }
    bool curve_static() const { return static_; }

private:
    const EnergyLevel* level_;
    const UnitSpeedCurve* curve_;
    int quad_level_ = 0;
    bool static_ = false;
    double z0_ = 0.0;
    double B_ = 0.0, A_ = 0.0, F_ = 0.0;
    double q4_ = 0.0;  // (4/N) sum_Lambda int <lambda/|lambda|, gamma'>^4
    std::vector<double> d_;                 // 2 int <.,.>^2 - L per half point
    std::vector<double> e_int_;             // E_lambda = d + L
    std::vector<double> p2_;                // int e_i e_j, (H x H) row-major
    std::vector<std::complex<double>> osc_; // z2b oscillatory integrals, (N x N)
    std::vector<double> w2_basis_;          // e_lambda(t) at quad nodes, (H x M)
    std::vector<std::pair<std::size_t, bool>> full_index_;  // half index, conjugate?
};

Projection2 project_2(const WaveSample& sample, const UnitSpeedCurve& curve);
WFunctionals W_functionals(const WaveSample& sample, const UnitSpeedCurve& curve);
Projection4 project_4(const WaveSample& sample, const UnitSpeedCurve& curve);

/// Quadratic-form law specification for the fourth-chaos limit:
/// (a1 (Z1^2 - 1) + a2 (Z2^2 - 1) + a3 Z1 Z2) / sqrt(denom).
struct MLawSpec {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;
    double denom = 0.0;
};

/// The textbook display of the law (denominator 16A - L^2, both diagonal
/// coefficients from int f^2); kept for the normalization audit.
MLawSpec m_law_unreconciled(const UnitSpeedCurve& curve, const SpectralMeasure& measure);

/// Audit-reconciled law: global sign flip, denominator 2(16A - L^2), and the
/// second diagonal coefficient built from int g^2. Matches the I(mu) route
/// and the closed-form circle law; see README for the audit.
MLawSpec m_law_reconciled(const UnitSpeedCurve& curve, const SpectralMeasure& measure);

double sample_limit_M(const MLawSpec& spec, GaussianStream& rng);
double sample_limit_M(const LimitCoefficients& coeffs, double denom, GaussianStream& rng);

/// Samples the fourth-chaos limit functional by realizing the Gaussian
/// process W2(mu) from its kernel k_mu on a t-grid (symmetric
/// eigendecomposition; tiny negative eigenvalues are clipped).
class LimitLawSamplerI {
public:
    LimitLawSamplerI(const UnitSpeedCurve& curve, const SpectralMeasure& measure,
                     int grid_size = 512);

    double draw(GaussianStream& rng) const;

    double deterministic_term() const { return det_term_; }
    double denominator() const { return denom_; }  // 2 (16A - L^2)
    int grid_size() const { return static_cast<int>(tq_.size()); }

private:
    void factor_kernel(const UnitSpeedCurve& curve, const SpectralMeasure& measure,
                       int grid_size);
    double functional_mean() const;

    std::vector<double> tq_, wq_;       // quadrature grid on [0, L]
    std::vector<double> modes_;         // (rank x M) rows scaled by sqrt(eigenvalue)
    std::size_t rank_ = 0;
    double L_ = 0.0;
    double det_term_ = 0.0;
    double denom_ = 0.0;
};

double sample_limit_I(const LimitLawSamplerI& sampler, GaussianStream& rng);

struct SigmaNDiagonalization {
    std::array<std::array<double, 3>, 3> sigma{};
    std::array<double, 3> eigenvalues_numeric{};      // descending
    std::array<double, 3> eigenvalues_closed_form{};  // descending
};

/// Covariance of (N1, N2, N3) for fourth Fourier coefficient mu_hat4 and its
/// eigendecomposition; closed form {(1+mu4)/4, 1/2, (1-mu4)/8}.
SigmaNDiagonalization diagonalize_N(double mu_hat4);

}  // namespace arw
