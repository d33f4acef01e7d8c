#include <doctest.h>

#include <cmath>

#include "arw/crossings.hpp"
#include "arw/kacrice.hpp"
#include "arw/rng.hpp"

using namespace arw;

TEST_CASE("first intensity") {
    CHECK(K1(2) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(K1(25) == doctest::Approx(std::sqrt(50.0)).epsilon(1e-15));
    CHECK(K1(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(K1(3), NotRepresentable);
}

TEST_CASE("exact two-point correlation: closed-form checkpoints") {
    double alpha = 2.0 * M_PI * M_PI * 65.0;

    CorrelationPoint indep{0, 1, 0.0, 0.0, 0.0, 0.0};
    CHECK(K2_exact(indep, alpha) == doctest::Approx(alpha / (M_PI * M_PI)).epsilon(1e-14));
    CHECK(K2_exact(indep, alpha) == doctest::Approx(K1(65) * K1(65)).epsilon(1e-14));

    CorrelationPoint half{0, 1, 0.0, 0.0, 0.0, alpha / 2.0};
    CHECK(K2_exact(half, alpha) ==
          doctest::Approx(alpha / (M_PI * M_PI) * (std::sqrt(3.0) / 2.0 + M_PI / 12.0))
              .epsilon(1e-14));

    GaussianStream rng(1, 0);
    for (int i = 0; i < 200; ++i) {
        // random admissible normalized covariances
        double r = 0.8 * (rng.next_unit() - 0.5);
        double n1 = 0.5 * (rng.next_unit() - 0.5);
        double n2 = 0.5 * (rng.next_unit() - 0.5);
        double n12 = 0.8 * (rng.next_unit() - 0.5);
        CorrelationPoint p{0, 1, r, n1 * std::sqrt(alpha), n2 * std::sqrt(alpha),
                           n12 * alpha};
        CHECK(K2_exact(p, alpha) >= 0.0);
    }

    CorrelationPoint near{0, 1, 0.9995, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(K2_exact(near, alpha), NearDiagonal);
    CorrelationPoint bad{0, 1, 0.0, 1.2 * std::sqrt(alpha), 0.0, 0.0};
    CHECK_THROWS_AS(K2_exact(bad, alpha), NonPositiveDiscriminant);
}

TEST_CASE("K2 symmetry under swapping the two arguments") {
    EnergyLevel level = enumerate_level(25);
    UnitSpeedCurve ell = build_unit_speed(CurveSpec::ellipse(0.5, 0.5, 0.25, 0.15));
    double alpha = level.alpha();
    GaussianStream rng(2, 0);
    for (int i = 0; i < 30; ++i) {
        double t1 = rng.next_unit() * ell.length();
        double t2 = rng.next_unit() * ell.length();
        CorrelationPoint a = correlation_point(level, ell, t1, t2);
        if (std::abs(a.r) > 0.9) continue;
        CorrelationPoint b = correlation_point(level, ell, t2, t1);
        CHECK(K2_exact(a, alpha) == doctest::Approx(K2_exact(b, alpha)).epsilon(1e-12));
        CHECK(a.r1 == doctest::Approx(b.r2).epsilon(1e-10));
    }
}

TEST_CASE("Taylor polynomial: small-covariance accuracy and decay order") {
    double alpha = 2.0 * M_PI * M_PI * 65.0;
    CorrelationPoint zero{0, 1, 0.0, 0.0, 0.0, 0.0};
    CHECK(K2_taylor(zero, alpha) == doctest::Approx(alpha / (M_PI * M_PI)).epsilon(1e-15));

    CorrelationPoint single{0, 1, 0.1, 0.0, 0.0, 0.0};
    CHECK(std::abs(K2_exact(single, alpha) - K2_taylor(single, alpha)) <
          1e-6 * alpha / (M_PI * M_PI));

    // |K2_exact - K2_taylor| ~ s^6 under uniform scaling of the normalized
    // covariances: log-log slope over s in [0.05, 0.3]
    const double base_r = 0.41, base_n1 = -0.33, base_n2 = 0.52, base_n12 = 0.47;
    std::vector<double> ls, ld;
    for (int i = 0; i < 8; ++i) {
        double s = 0.05 * std::pow(0.3 / 0.05, i / 7.0);
        CorrelationPoint p{0,
                           1,
                           s * base_r,
                           s * base_n1 * std::sqrt(alpha),
                           s * base_n2 * std::sqrt(alpha),
                           s * base_n12 * alpha};
        double diff = std::abs(K2_exact(p, alpha) - K2_taylor(p, alpha));
        REQUIRE(diff > 0.0);
        ls.push_back(std::log(s));
        ld.push_back(std::log(diff));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        mx += ls[i];
        my += ld[i];
    }
    mx /= ls.size();
    my /= ld.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        sxy += (ls[i] - mx) * (ld[i] - my);
        sxx += (ls[i] - mx) * (ls[i] - mx);
    }
    CHECK(sxy / sxx >= 5.5);
}

TEST_CASE("Lipschitz bound on r") {
    EnergyLevel level = enumerate_level(65);
    UnitSpeedCurve circle = build_unit_speed(CurveSpec::circle(0.5, 0.5, 0.2));
    double bound = 2.0 * M_PI * std::sqrt(2.0) * std::sqrt(level.eigenvalue);
    GaussianStream rng(3, 0);
    for (int i = 0; i < 200; ++i) {
        double t1 = rng.next_unit() * circle.length();
        double t2 = rng.next_unit() * circle.length();
        CovarianceBundle cb = covariance_bundle(level, circle, t1, t2);
        CHECK(std::abs(cb.r1) <= bound);
        CHECK(std::abs(cb.r2) <= bound);
    }
}

TEST_CASE("numeric Kac-Rice variance matches Monte Carlo") {
    EnergyLevel level = enumerate_level(65);
    UnitSpeedCurve circle = build_unit_speed(CurveSpec::circle(0.5, 0.5, 0.2));

    VarianceNumeric vn = variance_numeric(level, circle);
    MonteCarloSummary mc = run_campaign(level, circle, 4000, 1234, 20.0);

    // both estimate the true variance; the MC variance-of-variance governs
    // the comparison band
    double m4 = 0.0;
    for (long long c : mc.counts) {
        double d = static_cast<double>(c) - mc.empirical_mean;
        m4 += d * d * d * d;
    }
    m4 /= static_cast<double>(mc.trials);
    double se = std::sqrt(
        std::max(0.0, m4 - mc.empirical_variance * mc.empirical_variance) /
        static_cast<double>(mc.trials));
    CHECK(std::abs(vn.variance - mc.empirical_variance) <
          std::max(4.0 * se, 0.07 * vn.variance));

    // diagnostics: singular set contains at least the diagonal squares, band
    // extrapolation is a small correction
    CHECK(vn.singular_area_ratio >= 1.0 / vn.squares_per_side);
    CHECK(std::abs(vn.band_delta) < 0.02 * std::abs(vn.variance));
}

TEST_CASE("static approximate variance: positive and finite") {
    EnergyLevel l65 = enumerate_level(65);
    UnitSpeedCurve circle = build_unit_speed(CurveSpec::circle(0.5, 0.5, 0.2));
    double v = variance_approx_static(l65, circle);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);

    UnitSpeedCurve flower = build_unit_speed(CurveSpec::flower(0.5, 0.5, 0.2, 0.05, 3));
    EnergyLevel l25 = enumerate_level(25);
    double vf = variance_approx_static(l25, flower);
    CHECK(std::isfinite(vf));
    CHECK(vf > 0.0);

    UnitSpeedCurve ell = build_unit_speed(CurveSpec::ellipse(0.5, 0.5, 0.25, 0.15));
    CHECK_THROWS_AS(variance_approx_static(l65, ell), RegimeMismatch);
}

TEST_CASE("moment integrals: oracle identity and diagnostics") {
    EnergyLevel level = enumerate_level(65);
    UnitSpeedCurve circle = build_unit_speed(CurveSpec::circle(0.5, 0.5, 0.2));
    auto rows = moment_integrals(level, circle);

    auto find = [&](const std::string& name) -> const MomentRow& {
        for (const auto& row : rows)
            if (row.name == name) return row;
        REQUIRE(false);
        return rows.front();
    };

    // independent oracle: int int r^2 = L^2/N + (1/N^2) sum_{l != l'}
    // |int e^{2 pi i <l - l', gamma>} dt|^2, a sum of 1D quadratures
    double L = circle.length();
    double N = static_cast<double>(level.count);
    KahanSum off;
    for (std::size_t a = 0; a < level.points.size(); ++a)
        for (std::size_t b = 0; b < level.points.size(); ++b) {
            if (a == b) continue;
            double dx = static_cast<double>(level.points[a].x - level.points[b].x);
            double dy = static_cast<double>(level.points[a].y - level.points[b].y);
            double re = circle.integrate([&](double t, double) {
                Vec2 g = circle.position(t);
                return std::cos(2.0 * M_PI * (dx * g.x + dy * g.y));
            });
            double im = circle.integrate([&](double t, double) {
                Vec2 g = circle.position(t);
                return std::sin(2.0 * M_PI * (dx * g.x + dy * g.y));
            });
            off.add(re * re + im * im);
        }
    double oracle_r2 = L * L / N + off.value() / (N * N);
    CHECK(find("int r^2").value == doctest::Approx(oracle_r2).epsilon(1e-6));

    // n = 65 carries close lattice pairs, so the off-diagonal part is a
    // genuine O(1) correction to the leading prediction here
    CHECK(find("int r^2").ratio > 1.1);

    // |r| <= 1 forces the sixth moment under the fourth
    CHECK(find("int r^6").value < find("int r^4").value);
    CHECK(find("int r^6").value > 0.0);
    for (const auto& row : rows) CHECK(std::isfinite(row.value));

    // predictions carry the expected leading constants
    SpectralMeasure mu = spectral_measure(level);
    CHECK(find("int (r12/a)^4").prediction ==
          doctest::Approx(48.0 * A_functional(circle, mu) / (N * N)));
    CHECK(find("int r^4").prediction == doctest::Approx(3.0 * L * L / (N * N)));
}

TEST_CASE("moment ratios improve on a separated level") {
    // n = 2378 passes the delta-separation scan; 65 does not. The
    // off-diagonal corrections shrink accordingly.
    EnergyLevel lsep = enumerate_level(2378);
    REQUIRE(separation_stats(lsep, 0.02).is_delta_separated);
    EnergyLevel l65 = enumerate_level(65);
    UnitSpeedCurve circle = build_unit_speed(CurveSpec::circle(0.5, 0.5, 0.2));
    auto sep_rows = moment_integrals(lsep, circle, {2});
    auto rows65 = moment_integrals(l65, circle, {2});
    CHECK(sep_rows[0].ratio == doctest::Approx(1.0).epsilon(0.15));  // r^2
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(sep_rows[i].ratio - 1.0) < std::abs(rows65[i].ratio - 1.0));
        CHECK(sep_rows[i].ratio == doctest::Approx(1.0).epsilon(0.5));
    }
}
