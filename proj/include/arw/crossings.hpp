#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "arw/curve.hpp"
#include "arw/field.hpp"
#include "arw/lattice.hpp"

namespace arw {

struct CrossingCount {
    long long count = 0;
    std::vector<std::pair<double, double>> suspicious;  // unresolved intervals
    int refinement_depth = 0;
};

/// Grid restriction of a scalar function with pointwise re-evaluation;
/// RestrictedProcess converts to this, synthetic tests build one directly.
/// `second_derivative_bound`, when positive, lets the counter prove cells
/// free of zeros (a width-w cell containing two zeros must dip under
/// bound * w^2 / 8); zero disables the pruning.
struct GridFunction {
    std::vector<double> t, f;
    std::function<double(double)> eval;
    double second_derivative_bound = 0.0;
    bool closed = false;  // last node duplicates the first (same curve point)
};

GridFunction as_grid_function(const RestrictedProcess& process);

/// Counts zeros by sign changes with bisection refinement. Same-sign cells
/// whose endpoint values dip under near_zero_factor * max|f| are subdivided
/// up to max_depth; cells still ambiguous at the depth limit are flagged,
/// not counted.
CrossingCount count_zeros(const GridFunction& gf, double refine_tol,
                          double near_zero_factor = 1e-4, int max_depth = 60);

CrossingCount count_zeros(const RestrictedProcess& process, double refine_tol);

/// E[Z_n] = sqrt(2 n) L.
double expected_count(long long n, double L);

enum class Regime { Generic, Static };

/// Leading-order variance prediction with the level's own angular measure:
/// generic (4B - L^2) n / N, static (n / 4N^2)(16A - L^2).
double variance_prediction(const EnergyLevel& level, const UnitSpeedCurve& curve,
                           Regime regime);

enum class ReferenceLaw { StdNormal, StaticCircle };

double reference_cdf(ReferenceLaw law, double x);

/// One-sample Kolmogorov-Smirnov distance against a closed-form law.
double ks_distance(std::vector<double> samples, ReferenceLaw law);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> samples, std::vector<double> reference);

struct MonteCarloSummary {
    long long n = 0;
    std::string curve_id;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    double resolution = 0.0;
    std::vector<long long> counts;
    double empirical_mean = 0.0;
    double empirical_variance = 0.0;  // unbiased
    double theoretical_mean = 0.0;
    double theoretical_variance = 0.0;
    Regime regime = Regime::Generic;
    std::vector<double> standardized;  // (count - theoretical mean) / empirical sd
    std::vector<double> standardized_empirical;  // (count - empirical mean) / empirical sd
    double ks_normal = 0.0;
    double ks_static_circle = 0.0;
    double ks_limit_law = 0.0;  // two-sample, against reconciled M(mu_n) draws
    double flag_rate = 0.0;
    double even_fraction = 0.0;
    int max_refinement_depth = 0;
};

/// Runs `trials` independent draws (trial index keys the RNG stream, so the
/// result is independent of scheduling). Throws CampaignFailed when the
/// unresolved-tangency rate exceeds 0.1%.
MonteCarloSummary run_campaign(const EnergyLevel& level, const UnitSpeedCurve& curve,
                               std::uint64_t trials, std::uint64_t seed, double resolution);

}  // namespace arw
