#include "arw/crossings.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arw/chaos.hpp"
#include "arw/rng.hpp"

namespace arw {

GridFunction as_grid_function(const RestrictedProcess& process) {
    GridFunction gf;
    gf.t = process.t;
    gf.f = process.f;
    const RestrictedProcess* p = &process;
    gf.eval = [p](double t) { return p->eval(t); };

    // |f''| <= (E_n + 2 pi sqrt(n) max|kappa|) * sum of amplitude moduli
    const EnergyLevel& level = *process.level;
    double amp = 0.0;
    for (const auto& a : process.coeffs) amp += 2.0 * std::abs(a);
    amp /= std::sqrt(static_cast<double>(level.count));
    double kmax = 0.0;
    for (const auto& s : process.curve->samples()) kmax = std::max(kmax, std::abs(s.kappa));
    double sqn = std::sqrt(static_cast<double>(level.n));
    gf.second_derivative_bound = (level.eigenvalue + 2.0 * M_PI * sqn * kmax) * amp;
    gf.closed = process.curve->closed();
    return gf;
}

namespace {

struct ZeroCounter {
    const GridFunction& gf;
    double refine_tol;
    double thr;
    int max_depth;
    long long count = 0;
    int depth_used = 0;
    std::vector<std::pair<double, double>> suspicious;

    // standard bisection on a sign-changing bracket
    void refine(double a, double b, double fa, double fb) {
        int d = 0;
        while (b - a > refine_tol && d < max_depth) {
            double m = 0.5 * (a + b);
            double fm = gf.eval(m);
            if (fm == 0.0) break;
            if ((fa < 0) != (fm < 0)) {
                b = m;
                fb = fm;
            } else {
                a = m;
                fa = fm;
            }
            ++d;
        }
        (void)fb;
        depth_used = std::max(depth_used, d);
        ++count;
    }

    // could a same-sign sub-cell still hide a pair of zeros?
    bool may_hide_pair(double w, double fa, double fb) const {
        double v = std::min(std::abs(fa), std::abs(fb));
        if (gf.second_derivative_bound > 0.0)
            // two zeros inside force a dip under bound * w^2 / 8
            return v <= gf.second_derivative_bound * w * w / 8.0;
        return v < thr;
    }

    // same-sign cell suspected of hiding an even number of zeros
    void resolve(double a, double b, double fa, double fb, int depth) {
        if (!may_hide_pair(b - a, fa, fb)) return;
        if (depth >= max_depth || b - a <= refine_tol) {
            suspicious.emplace_back(a, b);
            return;
        }
        depth_used = std::max(depth_used, depth);
        double m = 0.5 * (a + b);
        double fm = gf.eval(m);
        if (fm == 0.0) {
            ++count;  // grazing zero hit exactly
            return;
        }
        if ((fm < 0) != (fa < 0)) {
            refine(a, m, fa, fm);
            refine(m, b, fm, fb);
            return;
        }
        resolve(a, m, fa, fm, depth + 1);
        resolve(m, b, fm, fb, depth + 1);
    }
};

// vertex value of the parabola through three consecutive samples
double parabola_vertex_value(double fm1, double f0, double fp1) {
    double curv = fp1 - 2.0 * f0 + fm1;
    if (curv == 0.0) return f0;
    double num = fp1 - fm1;
    return f0 - num * num / (8.0 * curv);
}

}  // namespace

CrossingCount count_zeros(const GridFunction& gf, double refine_tol, double near_zero_factor,
                          int max_depth) {
    const std::size_t m = gf.t.size();
    if (m < 2) throw Error("count_zeros: need at least two grid nodes");

    double max_abs = 0.0;
    for (double v : gf.f) max_abs = std::max(max_abs, std::abs(v));
    const double thr = near_zero_factor * max_abs;

    ZeroCounter zc{gf, refine_tol, thr, max_depth};

    // the last node of a closed grid duplicates the first curve point: skip
    // it for node zeros and read the seam cell against f[0]
    const std::size_t node_count = gf.closed ? m - 1 : m;
    for (std::size_t i = 0; i < node_count; ++i) {
        if (gf.f[i] == 0.0) ++zc.count;
    }

    for (std::size_t i = 0; i + 1 < m; ++i) {
        double fa = gf.f[i];
        double fb = (gf.closed && i + 2 == m) ? gf.f[0] : gf.f[i + 1];
        if (fa == 0.0 || fb == 0.0) continue;
        bool sa = fa < 0, sb = fb < 0;
        if (sa != sb) {
            zc.refine(gf.t[i], gf.t[i + 1], fa, fb);
            continue;
        }
        bool trigger = std::min(std::abs(fa), std::abs(fb)) < thr;
        if (!trigger && i > 0 && i + 2 < m) {
            // a same-sign dip interior to the stencil: the fitted vertex
            // estimates min |f| inside the cell pair
            double fm1 = gf.f[i - 1], fp1 = gf.f[i + 2];
            if ((fm1 < 0) == sa && (fp1 < 0) == sa && std::abs(fa) <= std::abs(fm1) &&
                std::abs(fb) <= std::abs(fp1)) {
                double v2 = parabola_vertex_value(fm1, fa, fb);
                double v3 = parabola_vertex_value(fa, fb, fp1);
                trigger = std::min(std::abs(v2), std::abs(v3)) < 10.0 * thr ||
                          (v2 < 0) != sa || (v3 < 0) != sa;
            }
        }
        if (trigger) zc.resolve(gf.t[i], gf.t[i + 1], fa, fb, 0);
    }

    CrossingCount out;
    out.count = zc.count;
    out.suspicious = std::move(zc.suspicious);
    out.refinement_depth = zc.depth_used;
    return out;
}

CrossingCount count_zeros(const RestrictedProcess& process, double refine_tol) {
    return count_zeros(as_grid_function(process), refine_tol);
}

double expected_count(long long n, double L) {
    if (!is_representable(n))
        throw NotRepresentable("expected_count: n is not a sum of two squares");
    return std::sqrt(2.0 * static_cast<double>(n)) * L;
}

double variance_prediction(const EnergyLevel& level, const UnitSpeedCurve& curve,
                           Regime regime) {
    const double n = static_cast<double>(level.n);
    const double N = static_cast<double>(level.count);
    const double L = curve.length();
    SpectralMeasure mu = spectral_measure(level);
    if (regime == Regime::Static) {
        if (!is_static(curve))
            throw RegimeMismatch("static variance formula requested for a non-static curve");
        return n / (4.0 * N * N) * (16.0 * A_functional(curve, mu) - L * L);
    }
    return (4.0 * B_functional(curve, mu) - L * L) * n / N;
}

double reference_cdf(ReferenceLaw law, double x) {
    switch (law) {
        case ReferenceLaw::StdNormal:
            return 0.5 * std::erfc(-x / std::sqrt(2.0));
        case ReferenceLaw::StaticCircle:
            // law of 1 - W with W ~ Exp(1), i.e. of 1 - (Z1^2 + Z2^2)/2
            return x <= 1.0 ? std::exp(-(1.0 - x)) : 1.0;
    }
    return 0.0;
}

double ks_distance(std::vector<double> samples, ReferenceLaw law) {
    if (samples.size() < 100) throw Error("ks_distance: need at least 100 samples");
    std::sort(samples.begin(), samples.end());
    const double m = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double F = reference_cdf(law, samples[i]);
        d = std::max(d, std::abs((i + 1) / m - F));
        d = std::max(d, std::abs(F - i / m));
    }
    return d;
}

double ks_distance(std::vector<double> samples, std::vector<double> reference) {
    if (samples.size() < 100 || reference.size() < 100)
        throw Error("ks_distance: need at least 100 samples");
    std::sort(samples.begin(), samples.end());
    std::sort(reference.begin(), reference.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    const double inv_m = 1.0 / samples.size(), inv_r = 1.0 / reference.size();
    while (i < samples.size() && j < reference.size()) {
        if (samples[i] <= reference[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(i * inv_m - j * inv_r));
    }
    return d;
}

MonteCarloSummary run_campaign(const EnergyLevel& level, const UnitSpeedCurve& curve,
                               std::uint64_t trials, std::uint64_t seed, double resolution) {
    MonteCarloSummary out;
    out.n = level.n;
    out.curve_id = curve_identifier(curve.spec());
    out.trials = trials;
    out.seed = seed;
    out.resolution = resolution;
    out.theoretical_mean = expected_count(level.n, curve.length());
    out.regime = is_static(curve) ? Regime::Static : Regime::Generic;
    out.theoretical_variance = variance_prediction(level, curve, out.regime);

    RestrictedGrid grid(level, curve, resolution);
    out.counts.assign(trials, 0);
    std::vector<int> depth(trials, 0);
    std::vector<char> flagged(trials, 0);
    parallel_for(trials, [&](std::size_t trial) {
        WaveSample sample = sample_coefficients(level, seed, trial);
        RestrictedProcess proc = grid.realize(sample);
        CrossingCount cc = count_zeros(proc, 1e-10);
        out.counts[trial] = cc.count;
        depth[trial] = cc.refinement_depth;
        flagged[trial] = cc.suspicious.empty() ? 0 : 1;
    });

    long long flags = std::accumulate(flagged.begin(), flagged.end(), 0LL);
    out.flag_rate = static_cast<double>(flags) / static_cast<double>(trials);
    out.max_refinement_depth = *std::max_element(depth.begin(), depth.end());

    KahanSum mean;
    for (long long c : out.counts) mean.add(static_cast<double>(c));
    out.empirical_mean = mean.value() / static_cast<double>(trials);
    KahanSum var;
    long long even = 0;
    for (long long c : out.counts) {
        double d = static_cast<double>(c) - out.empirical_mean;
        var.add(d * d);
        if (c % 2 == 0) ++even;
    }
    out.empirical_variance = var.value() / static_cast<double>(trials - 1);
    out.even_fraction = static_cast<double>(even) / static_cast<double>(trials);

    const double sd = std::sqrt(out.empirical_variance);
    out.standardized.resize(trials);
    out.standardized_empirical.resize(trials);
    for (std::uint64_t i = 0; i < trials; ++i) {
        out.standardized[i] =
            (static_cast<double>(out.counts[i]) - out.theoretical_mean) / sd;
        out.standardized_empirical[i] =
            (static_cast<double>(out.counts[i]) - out.empirical_mean) / sd;
    }

    out.ks_normal = ks_distance(out.standardized, ReferenceLaw::StdNormal);
    out.ks_static_circle = ks_distance(out.standardized, ReferenceLaw::StaticCircle);
    try {
        MLawSpec law = m_law_reconciled(curve, spectral_measure(level));
        GaussianStream rng(seed ^ 0x4c696d69744d6331ULL, 0);
        std::vector<double> ref(50000);
        for (double& v : ref) v = sample_limit_M(law, rng);
        out.ks_limit_law = ks_distance(out.standardized, ref);
    } catch (const DegenerateDenominator&) {
        out.ks_limit_law = std::numeric_limits<double>::quiet_NaN();
    }

    if (out.flag_rate > 0.001)
        throw CampaignFailed("unresolved-tangency flag rate exceeds 0.1%");
    return out;
}

}  // namespace arw
