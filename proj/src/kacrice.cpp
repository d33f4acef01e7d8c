#include "arw/kacrice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arw/crossings.hpp"
#include "arw/quadrature.hpp"

namespace arw {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

using NodeGeom = UnitSpeedCurve::PosTan;

// covariance bundle against precomputed node geometry
CovarianceBundle covariance_at(const EnergyLevel& level, const NodeGeom& g1,
                               const NodeGeom& g2) {
    double r = 0, r1 = 0, r2 = 0, r12 = 0;
    for (const auto& p : level.points) {
        double lx = static_cast<double>(p.x), ly = static_cast<double>(p.y);
        double ph = kTwoPi * (lx * (g1.pos.x - g2.pos.x) + ly * (g1.pos.y - g2.pos.y));
        double c = std::cos(ph), s = std::sin(ph);
        double a1 = kTwoPi * (lx * g1.tan.x + ly * g1.tan.y);
        double a2 = kTwoPi * (lx * g2.tan.x + ly * g2.tan.y);
        r += c;
        r1 += -s * a1;
        r2 += s * a2;
        r12 += c * a1 * a2;
    }
    double N = static_cast<double>(level.count);
    return {r / N, r1 / N, r2 / N, r12 / N};
}

CorrelationPoint point_from_geom(const EnergyLevel& level, const NodeGeom& g1,
                                 const NodeGeom& g2, double t1, double t2) {
    CovarianceBundle cb = covariance_at(level, g1, g2);
    return {t1, t2, cb.r, cb.r1, cb.r2, cb.r12};
}

}  // namespace

CorrelationPoint correlation_point(const EnergyLevel& level, const UnitSpeedCurve& curve,
                                   double t1, double t2) {
    CovarianceBundle cb = covariance_bundle(level, curve, t1, t2);
    return {t1, t2, cb.r, cb.r1, cb.r2, cb.r12};
}

double K1(long long n) {
    if (!is_representable(n)) throw NotRepresentable("K1: n is not a sum of two squares");
    return std::sqrt(2.0 * static_cast<double>(n));
}

double K2_exact(const CorrelationPoint& p, double alpha, double eps) {
    const double r = p.r;
    if (!(std::abs(r) <= 1.0 - eps)) throw NearDiagonal("K2_exact: |r| too close to 1");
    const double one_m_r2 = 1.0 - r * r;
    const double n1 = p.r1 / std::sqrt(alpha);
    const double n2 = p.r2 / std::sqrt(alpha);
    const double n12 = p.r12 / alpha;

    const double d1 = one_m_r2 - n1 * n1;
    const double d2 = one_m_r2 - n2 * n2;
    if (!(d1 > 0.0) || !(d2 > 0.0))
        throw NonPositiveDiscriminant("K2_exact: conditional variance not positive");

    const double mu = alpha * std::sqrt(d1) * std::sqrt(d2);
    double rho = (n12 * one_m_r2 + r * n1 * n2) / (std::sqrt(d1) * std::sqrt(d2));
    rho = std::clamp(rho, -1.0, 1.0);

    const double g = std::sqrt(1.0 - rho * rho) + rho * std::asin(rho);
    return mu * g / (M_PI * M_PI * std::pow(one_m_r2, 1.5));
}

double K2_taylor(const CorrelationPoint& p, double alpha) {
    const double r = p.r;
    const double n1 = p.r1 / std::sqrt(alpha);
    const double n2 = p.r2 / std::sqrt(alpha);
    const double w = p.r12 / alpha;

    double val = 1.0 + 0.5 * w * w + 0.5 * r * r - 0.5 * n2 * n2 - 0.5 * n1 * n1;
    val += 0.375 * r * r * r * r + w * w * w * w / 24.0;
    val -= 0.125 * (n2 * n2 * n2 * n2 + n1 * n1 * n1 * n1);
    val += w * r * n1 * n2;
    val += 0.25 * n1 * n1 * n2 * n2;
    val -= 0.75 * r * r * (n2 * n2 + n1 * n1);
    val += 0.25 * w * w * r * r;
    val += 0.25 * w * w * (n2 * n2 + n1 * n1);
    return alpha / (M_PI * M_PI) * val;
}

namespace {

// 11-term quartic block of the approximate Kac-Rice integrand
double quartic_integrand(const CorrelationPoint& p, double alpha) {
    const double r = p.r;
    const double n1 = p.r1 / std::sqrt(alpha);
    const double n2 = p.r2 / std::sqrt(alpha);
    const double w = p.r12 / alpha;
    double val = 0.75 * r * r * r * r + w * w * w * w / 12.0;
    val -= 0.25 * (n2 * n2 * n2 * n2 + n1 * n1 * n1 * n1);
    val += 2.0 * w * r * n1 * n2;
    val += 0.5 * n1 * n1 * n2 * n2;
    val -= 1.5 * r * r * (n2 * n2 + n1 * n1);
    val += 0.5 * w * w * r * r;
    val += 0.5 * w * w * (n2 * n2 + n1 * n1);
    return val;
}

struct SquarePartition {
    int k = 0;
    double delta0 = 0.0;
    std::vector<char> singular;  // row-major k x k
    bool is_singular(int i, int j) const { return singular[i * k + j] != 0; }
};

// 4x4 probe per square; |r| > 1/2 anywhere marks singular, diagonal squares
// always singular
SquarePartition partition_squares(const EnergyLevel& level, const UnitSpeedCurve& curve,
                                  double c0) {
    SquarePartition part;
    const double L = curve.length();
    part.k = static_cast<int>(std::floor(L * std::sqrt(level.eigenvalue) / c0)) + 1;
    if (part.k > 8192)
        throw LevelTooLarge("square partition would need k > 8192 tiles per side");
    part.delta0 = L / part.k;
    part.singular.assign(static_cast<std::size_t>(part.k) * part.k, 0);

    const int probe = 4;
    std::vector<NodeGeom> cache(static_cast<std::size_t>(part.k) * probe);
    for (int i = 0; i < part.k; ++i)
        for (int p = 0; p < probe; ++p) {
            double t = (i + p / static_cast<double>(probe - 1)) * part.delta0;
            cache[i * probe + p] = curve.geometry(std::min(t, L));
        }

    parallel_for(static_cast<std::size_t>(part.k), [&](std::size_t i) {
        for (int j = 0; j < part.k; ++j) {
            if (static_cast<int>(i) == j) {
                part.singular[i * part.k + j] = 1;
                continue;
            }
            bool sing = false;
            for (int p = 0; p < probe && !sing; ++p)
                for (int q = 0; q < probe && !sing; ++q) {
                    CovarianceBundle cb =
                        covariance_at(level, cache[i * probe + p], cache[j * probe + q]);
                    if (std::abs(cb.r) > 0.5) sing = true;
                }
            part.singular[i * part.k + j] = sing ? 1 : 0;
        }
    });
    return part;
}

// exact K2 in band coordinates, wrapped onto [0, L) for closed curves
struct K2Evaluator {
    const EnergyLevel* level;
    const UnitSpeedCurve* curve;
    double alpha = 0.0;
    double L = 0.0;
    bool closed = false;
    double eps = 1e-3;
    double band = 0.0;

    double mod_t(double t) const {
        if (!closed) return std::clamp(t, 0.0, L);
        t = std::fmod(t, L);
        if (t < 0) t += L;
        return t;
    }

    double exact_fresh(double t1, double t2) const {
        NodeGeom g1 = curve->geometry(mod_t(t1));
        NodeGeom g2 = curve->geometry(mod_t(t2));
        return K2_exact(point_from_geom(*level, g1, g2, t1, t2), alpha, eps);
    }
};

/// Adaptive tensor Gauss-Legendre over [a1,b1] x [a2,b2] with per-level
/// caching of the curve geometry along each axis.
template <typename PairFn>
double integrate_square_cached(const UnitSpeedCurve& curve, const PairFn& f, double a1,
                               double b1, double a2, double b2, double rel_tol,
                               int depth = 0) {
    auto tensor = [&](int panels) {
        std::vector<double> t1, w1, t2, w2;
        gl_nodes(a1, b1, panels, t1, w1);
        gl_nodes(a2, b2, panels, t2, w2);
        std::vector<NodeGeom> g1(t1.size()), g2(t2.size());
        for (std::size_t i = 0; i < t1.size(); ++i) g1[i] = curve.geometry(t1[i]);
        for (std::size_t j = 0; j < t2.size(); ++j) g2[j] = curve.geometry(t2[j]);
        KahanSum acc;
        for (std::size_t i = 0; i < t1.size(); ++i)
            for (std::size_t j = 0; j < t2.size(); ++j)
                acc.add(w1[i] * w2[j] * f(g1[i], g2[j], t1[i], t2[j]));
        return acc.value();
    };
    double coarse = tensor(1);
    double fine = tensor(2);
    double scale = std::max({1e-12, std::abs(coarse), std::abs(fine)});
    if (std::abs(fine - coarse) <= rel_tol * scale || depth >= 6) {
        if (depth >= 6 && std::abs(fine - coarse) > 100 * rel_tol * scale)
            throw QuadratureNotConverged("integrate_square_cached: subdivision limit");
        return fine;
    }
    double m1 = 0.5 * (a1 + b1), m2 = 0.5 * (a2 + b2);
    return integrate_square_cached(curve, f, a1, m1, a2, m2, rel_tol, depth + 1) +
           integrate_square_cached(curve, f, a1, m1, m2, b2, rel_tol, depth + 1) +
           integrate_square_cached(curve, f, m1, b1, a2, m2, rel_tol, depth + 1) +
           integrate_square_cached(curve, f, m1, b1, m2, b2, rel_tol, depth + 1);
}

template <typename PairFn>
double integrate_partition(const UnitSpeedCurve& curve, const SquarePartition& part,
                           const PairFn& f, double L, bool skip_singular) {
    const std::size_t k = static_cast<std::size_t>(part.k);
    std::vector<double> row_sums(k, 0.0);
    parallel_for(k, [&](std::size_t i) {
        KahanSum acc;
        for (std::size_t j = 0; j < k; ++j) {
            if (skip_singular && part.is_singular(static_cast<int>(i), static_cast<int>(j)))
                continue;
            double a1 = i * part.delta0, b1 = std::min(L, (i + 1) * part.delta0);
            double a2 = j * part.delta0, b2 = std::min(L, (j + 1) * part.delta0);
            acc.add(integrate_square_cached(curve, f, a1, b1, a2, b2, 1e-6));
        }
        row_sums[i] = acc.value();
    });
    KahanSum total;
    for (double v : row_sums) total.add(v);
    return total.value();
}

}  // namespace

namespace {

// one-sided quadratic extrapolation of K2(u, .) from samples at
// (scale, 1.5 scale, 2 scale) down to the diagonal, integrated over
// v in [0, band] (3-point Gauss is exact for the quadratic)
double extrap_panel_integral(const K2Evaluator& k2, double u, double band, double scale) {
    double v1 = scale, v2 = 1.5 * scale, v3 = 2.0 * scale;
    double f1 = k2.exact_fresh(u + 0.5 * v1, u - 0.5 * v1);
    double f2 = k2.exact_fresh(u + 0.5 * v2, u - 0.5 * v2);
    double f3 = k2.exact_fresh(u + 0.5 * v3, u - 0.5 * v3);
    auto value = [&](double v) {
        double l1 = (v - v2) * (v - v3) / ((v1 - v2) * (v1 - v3));
        double l2 = (v - v1) * (v - v3) / ((v2 - v1) * (v2 - v3));
        double l3 = (v - v1) * (v - v2) / ((v3 - v1) * (v3 - v2));
        return f1 * l1 + f2 * l2 + f3 * l3;
    };
    // 3-point Gauss-Legendre on [0, band]
    constexpr double g = 0.7745966692414834;  // sqrt(3/5)
    double mid = 0.5 * band, rad = 0.5 * band;
    return rad * ((5.0 / 9.0) * (value(mid - rad * g) + value(mid + rad * g)) +
                  (8.0 / 9.0) * value(mid));
}

}  // namespace

VarianceNumeric variance_numeric(const EnergyLevel& level, const UnitSpeedCurve& curve,
                                 double c0) {
    const double L = curve.length();
    const double alpha = level.alpha();
    const double EZ = std::sqrt(2.0 * static_cast<double>(level.n)) * L;
    const bool closed = curve.closed();

    SquarePartition part = partition_squares(level, curve, c0);

    K2Evaluator k2{&level, &curve, alpha, L, closed};
    // |r| <= 1 - eps needs |v| >~ sqrt(2 eps / alpha); keep a safety margin
    k2.band = 1.5 * std::sqrt(2.0 * k2.eps / alpha);

    VarianceNumeric out;
    out.squares_per_side = part.k;
    out.c0_used = c0;
    out.band_halfwidth = k2.band;

    // Integration runs in rotated coordinates u = (t1 + t2)/2, v = t1 - t2
    // (unit Jacobian). K2 is even in v, so the v > 0 half is doubled. The
    // extrapolated sliver [0, band] gets its own panel, which keeps every
    // panel integrand smooth.
    const double vmax = closed ? 0.5 * L : L;
    auto u_range = [&](double v, double& ua, double& ub) {
        if (closed) {
            ua = 0.0;
            ub = L;
        } else {
            ua = 0.5 * v;
            ub = L - 0.5 * v;
        }
    };
    auto u_integral = [&](double v) {
        double ua, ub;
        u_range(v, ua, ub);
        if (!(ub > ua)) return 0.0;
        // resolve the oscillation of K2 along u
        int panels0 = std::max<int>(
            16, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(level.n)) *
                                           (ub - ua))));
        return gl_integrate_adaptive(
            [&](double u) { return k2.exact_fresh(u + 0.5 * v, u - 0.5 * v); }, ua, ub,
            panels0, 1e-8, 5);
    };

    // geometric v-panels from the band out to vmax
    std::vector<double> edges{k2.band};
    while (edges.back() < vmax) edges.push_back(std::min(vmax, 2.0 * edges.back()));
    KahanSum outer;
    std::vector<double> panel_vals(edges.size() - 1, 0.0);
    parallel_for(edges.size() - 1, [&](std::size_t p) {
        panel_vals[p] = gl_integrate(u_integral, edges[p], edges[p + 1], 2);
    });
    for (double v : panel_vals) outer.add(v);

    // extrapolated sliver [0, band], plus the halved-band control rerun
    auto sliver = [&](double scale) {
        double ua, ub;
        u_range(k2.band, ua, ub);
        int panels = std::max<int>(
            16, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(level.n)) * L)));
        return gl_integrate(
            [&](double u) { return extrap_panel_integral(k2, u, k2.band, scale); }, ua, ub,
            panels);
    };
    double sliver_full = sliver(k2.band);
    double sliver_ctrl = sliver(0.75 * k2.band);
    out.band_delta = 2.0 * (sliver_ctrl - sliver_full);

    out.integral_K2 = 2.0 * (outer.value() + sliver_full);

    std::size_t n_sing = 0;
    for (char s : part.singular) n_sing += s;
    out.singular_area = static_cast<double>(n_sing) * part.delta0 * part.delta0;
    out.singular_area_ratio = out.singular_area / (L * L);

    out.variance = out.integral_K2 + EZ - EZ * EZ;
    return out;
}

double variance_approx_static(const EnergyLevel& level, const UnitSpeedCurve& curve,
                              double c0) {
    if (!is_static(curve))
        throw RegimeMismatch("variance_approx_static requires a static curve");
    const double L = curve.length();
    const double alpha = level.alpha();

    SquarePartition part = partition_squares(level, curve, c0);
    auto fn = [&](const NodeGeom& g1, const NodeGeom& g2, double t1, double t2) {
        return quartic_integrand(point_from_geom(level, g1, g2, t1, t2), alpha);
    };
    double integral = integrate_partition(curve, part, fn, L, true);
    return static_cast<double>(level.n) * integral;
}

std::vector<MomentRow> moment_integrals(const EnergyLevel& level, const UnitSpeedCurve& curve,
                                        const std::vector<int>& orders) {
    const double L = curve.length();
    const double alpha = level.alpha();
    const double N = static_cast<double>(level.count);

    SpectralMeasure mu = spectral_measure(level);
    const double B = B_functional(curve, mu);
    const double A = A_functional(curve, mu);
    const double F = F_functional(curve, level);

    // fixed tensor grid; the fastest integrand component oscillates at
    // ~6 sqrt(n) per unit length (sixth powers)
    int per_dim = std::max(
        512, 32 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(level.n)) * L)));
    int panels = (per_dim + 15) / 16;
    std::vector<double> t, w;
    gl_nodes(0.0, L, panels, t, w);
    const std::size_t m = t.size();
    std::vector<NodeGeom> g(m);
    for (std::size_t i = 0; i < m; ++i) g[i] = curve.geometry(t[i]);

    bool want2 = std::find(orders.begin(), orders.end(), 2) != orders.end();
    bool want4 = std::find(orders.begin(), orders.end(), 4) != orders.end();
    bool want6 = std::find(orders.begin(), orders.end(), 6) != orders.end();

    constexpr int kCols = 14;
    std::vector<std::vector<double>> partial(m, std::vector<double>(kCols, 0.0));
    parallel_for(m, [&](std::size_t i) {
        auto& row = partial[i];
        for (std::size_t j = 0; j < m; ++j) {
            CovarianceBundle cb = covariance_at(level, g[i], g[j]);
            double ww = w[i] * w[j];
            double r = cb.r;
            double n1 = cb.r1 / std::sqrt(alpha);
            double n2 = cb.r2 / std::sqrt(alpha);
            double n12 = cb.r12 / alpha;
            if (want2) {
                row[0] += ww * r * r;
                row[1] += ww * n1 * n1;
                row[2] += ww * n12 * n12;
            }
            if (want4) {
                double r2 = r * r, p1 = n1 * n1, p2 = n2 * n2, q = n12 * n12;
                row[3] += ww * r2 * r2;
                row[4] += ww * p1 * p1;
                row[5] += ww * q * q;
                row[6] += ww * n12 * r * n1 * n2;
                row[7] += ww * p1 * p2;
                row[8] += ww * r2 * p2;
                row[9] += ww * r2 * q;
                row[10] += ww * p1 * q;
            }
            if (want6) {
                double r2 = r * r, p1 = n1 * n1, q = n12 * n12;
                row[11] += ww * r2 * r2 * r2;
                row[12] += ww * p1 * p1 * p1;
                row[13] += ww * q * q * q;
            }
        }
    });
    std::vector<KahanSum> acc(kCols);
    for (std::size_t i = 0; i < m; ++i)
        for (int c = 0; c < kCols; ++c) acc[c].add(partial[i][c]);

    auto make_row = [](const std::string& name, double value, double pred) {
        MomentRow row{name, value, pred, 0.0};
        row.ratio = pred != 0.0 ? value / pred : std::numeric_limits<double>::quiet_NaN();
        return row;
    };

    const double L2 = L * L, N2 = N * N;
    std::vector<MomentRow> rows;
    if (want2) {
        // leading second moments for the alpha-normalized derivatives; the
        // lambda and -lambda families contribute equally, which doubles the
        // E_n-normalized constants
        rows.push_back(make_row("int r^2", acc[0].value(), L2 / N));
        rows.push_back(make_row("int (r1/sa)^2", acc[1].value(), L2 / N));
        rows.push_back(make_row("int (r12/a)^2", acc[2].value(), 4.0 * B / N));
    }
    if (want4) {
        rows.push_back(make_row("int r^4", acc[3].value(), 3.0 * L2 / N2));
        rows.push_back(make_row("int (r1/sa)^4", acc[4].value(), 3.0 * L2 / N2));
        rows.push_back(make_row("int (r12/a)^4", acc[5].value(), 48.0 * A / N2));
        rows.push_back(
            make_row("int (r12/a) r (r1/sa)(r2/sa)", acc[6].value(), -4.0 * F / N2));
        rows.push_back(
            make_row("int (r1/sa)^2 (r2/sa)^2", acc[7].value(), L2 / N2 + 8.0 * F / N2));
        rows.push_back(make_row("int r^2 (r2/sa)^2", acc[8].value(), L2 / N2));
        rows.push_back(
            make_row("int r^2 (r12/a)^2", acc[9].value(), 4.0 * B / N2 + 8.0 * F / N2));
        rows.push_back(make_row("int (r1/sa)^2 (r12/a)^2", acc[10].value(), 4.0 * B / N2));
    }
    if (want6) {
        rows.push_back(make_row("int r^6", acc[11].value(), 0.0));
        rows.push_back(make_row("int (r1/sa)^6", acc[12].value(), 0.0));
        rows.push_back(make_row("int (r12/a)^6", acc[13].value(), 0.0));
    }
    return rows;
}

}  // namespace arw
