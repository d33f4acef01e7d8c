#pragma once

#include <string>
#include <vector>

#include "arw/curve.hpp"
#include "arw/field.hpp"
#include "arw/lattice.hpp"

namespace arw {

struct CorrelationPoint {
    double t1 = 0.0, t2 = 0.0;
    double r = 0.0, r1 = 0.0, r2 = 0.0, r12 = 0.0;
};

CorrelationPoint correlation_point(const EnergyLevel& level, const UnitSpeedCurve& curve,
                                   double t1, double t2);

/// First intensity of zeros: sqrt(2 n).
double K1(long long n);

/// Exact two-point correlation of zeros from (r, r1, r2, r12) and
/// alpha = 2 pi^2 n. Throws NearDiagonal when |r| > 1 - eps and
/// NonPositiveDiscriminant when the covariance data is inconsistent.
double K2_exact(const CorrelationPoint& point, double alpha, double eps = 1e-3);

/// Fourth-order Taylor polynomial of K2 in the normalized covariances.
double K2_taylor(const CorrelationPoint& point, double alpha);

struct VarianceNumeric {
    double variance = 0.0;
    double integral_K2 = 0.0;
    double singular_area = 0.0;       // absolute area of singular squares
    double singular_area_ratio = 0.0; // fraction of [0,L]^2
    int squares_per_side = 0;
    double c0_used = 0.0;
    double band_halfwidth = 0.0;      // extrapolation band half-width in t1 - t2
    double band_delta = 0.0;          // change under halving the band width
};

/// Kac-Rice variance: integrates K2 over [0,L]^2 (smooth continuation across
/// the near-diagonal band by quadratic extrapolation in the band coordinate)
/// and adds E[Z] - E[Z]^2.
VarianceNumeric variance_numeric(const EnergyLevel& level, const UnitSpeedCurve& curve,
                                 double c0 = 0.5);

/// n * double integral of the 11-term quartic integrand over the nonsingular
/// squares; valid for static curves (RegimeMismatch otherwise).
double variance_approx_static(const EnergyLevel& level, const UnitSpeedCurve& curve,
                              double c0 = 0.5);

struct MomentRow {
    std::string name;
    double value = 0.0;       // numeric double integral
    double prediction = 0.0;  // leading-order prediction
    double ratio = 0.0;       // value / prediction (inf-safe)
};

/// Numeric moment integrals of r and its normalized derivatives with their
/// leading-order predictions. orders selects 2, 4, 6 (any subset).
std::vector<MomentRow> moment_integrals(const EnergyLevel& level, const UnitSpeedCurve& curve,
                                        const std::vector<int>& orders = {2, 4, 6});

}  // namespace arw
