#include <doctest.h>

#include <cmath>
#include <complex>

#include "arw/field.hpp"
#include "arw/rng.hpp"

using namespace arw;

TEST_CASE("coefficients are standard complex Gaussians, deterministic per stream") {
    EnergyLevel level = enumerate_level(25);
    KahanSum sq, re;
    const int trials = 20000;  // > 1e5 draws over the six half points
    for (int trial = 0; trial < trials; ++trial) {
        WaveSample s = sample_coefficients(level, 42, trial);
        for (const auto& a : s.coeffs) {
            sq.add(std::norm(a));
            re.add(a.real());
        }
    }
    double m = static_cast<double>(trials) * level.half_points.size();
    CHECK(sq.value() / m == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(re.value() / m) < 0.02);

    WaveSample a = sample_coefficients(level, 42, 7);
    WaveSample b = sample_coefficients(level, 42, 7);
    WaveSample c = sample_coefficients(level, 42, 8);
    CHECK(a.coeffs == b.coeffs);  // bit-identical
    CHECK(a.coeffs != c.coeffs);
}

TEST_CASE("waves are real: full Fourier sum has vanishing imaginary part") {
    EnergyLevel level = enumerate_level(65);
    WaveSample s = sample_coefficients(level, 1, 0);
    GaussianStream rng(5, 0);
    for (int i = 0; i < 100; ++i) {
        Vec2 x{rng.next_unit(), rng.next_unit()};
        // independent route: sum over the full lattice with a_{-l} = conj(a_l)
        std::complex<double> total{0.0, 0.0};
        for (std::size_t j = 0; j < level.half_points.size(); ++j) {
            const auto& p = level.half_points[j];
            double ph = 2.0 * M_PI * (p.x * x.x + p.y * x.y);
            std::complex<double> e{std::cos(ph), std::sin(ph)};
            total += s.coeffs[j] * e + std::conj(s.coeffs[j]) * std::conj(e);
        }
        total /= std::sqrt(static_cast<double>(level.count));
        CHECK(std::abs(total.imag()) < 1e-12);
        CHECK(evaluate_wave(s, x) == doctest::Approx(total.real()).epsilon(1e-10));
    }
}

TEST_CASE("restricted process: unit variance, derivative variance 2 pi^2 n") {
    EnergyLevel level = enumerate_level(25);
    UnitSpeedCurve curve = build_unit_speed(CurveSpec::circle(0.5, 0.5, 0.2));
    RestrictedGrid grid(level, curve, 12.0);

    KahanSum f2, fp2;
    const int trials = 400;
    std::size_t m = 0;
    for (int trial = 0; trial < trials; ++trial) {
        RestrictedProcess p = grid.realize(sample_coefficients(level, 9, trial));
        for (std::size_t i = 0; i < p.t.size(); i += 7) {
            f2.add(p.f[i] * p.f[i]);
            fp2.add(p.fp[i] * p.fp[i]);
            if (trial == 0) ++m;
        }
    }
    double total = static_cast<double>(trials) * static_cast<double>(m);
    double alpha = level.alpha();
    CHECK(f2.value() / total == doctest::Approx(1.0).epsilon(0.05));
    CHECK(fp2.value() / total == doctest::Approx(alpha).epsilon(0.05));
}

TEST_CASE("derivative agrees with centered differences") {
    EnergyLevel level = enumerate_level(25);
    UnitSpeedCurve curve = build_unit_speed(CurveSpec::circle(0.5, 0.5, 0.2));
    WaveSample s = sample_coefficients(level, 3, 1);
    RestrictedProcess p = evaluate_restricted(s, curve, 10.0);

    double h = 1e-6;
    double max_err = 0.0, scale = 0.0;
    for (std::size_t i = 1; i + 1 < p.t.size(); i += 11) {
        double fd = (p.eval(p.t[i] + h) - p.eval(p.t[i] - h)) / (2.0 * h);
        max_err = std::max(max_err, std::abs(fd - p.fp[i]));
        scale = std::max(scale, std::abs(p.fp[i]));
    }
    // O(h^2) truncation: h^2 * |f'''| ~ h^2 E^{3/2}
    CHECK(max_err < 1e-6 * scale + 1e-9);

    // grid f and fp match pointwise evaluation
    for (std::size_t i = 0; i < p.t.size(); i += 37) {
        CHECK(p.f[i] == doctest::Approx(p.eval(p.t[i])).epsilon(1e-9));
        CHECK(p.fp[i] == doctest::Approx(p.eval_deriv(p.t[i])).epsilon(1e-9));
    }
}

TEST_CASE("covariance bundle: diagonal values and finite differences") {
    EnergyLevel level = enumerate_level(65);
    UnitSpeedCurve curve = build_unit_speed(CurveSpec::circle(0.5, 0.5, 0.2));
    double alpha = level.alpha();

    for (double t : {0.0, 0.4, 1.1}) {
        CovarianceBundle cb = covariance_bundle(level, curve, t, t);
        CHECK(cb.r == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(cb.r1) < 1e-9 * alpha);
        CHECK(std::abs(cb.r2) < 1e-9 * alpha);
        CHECK(cb.r12 == doctest::Approx(alpha).epsilon(1e-12));
    }

    GaussianStream rng(21, 0);
    double L = curve.length();
    for (int i = 0; i < 20; ++i) {
        double t1 = rng.next_unit() * L, t2 = rng.next_unit() * L;
        CovarianceBundle cb = covariance_bundle(level, curve, t1, t2);
        CHECK(std::abs(cb.r) <= 1.0 + 1e-12);
        double h = 1e-7;
        double fd1 = (covariance_bundle(level, curve, t1 + h, t2).r -
                      covariance_bundle(level, curve, t1 - h, t2).r) /
                     (2.0 * h);
        double fd12 = (covariance_bundle(level, curve, t1, t2 + h).r1 -
                       covariance_bundle(level, curve, t1, t2 - h).r1) /
                      (2.0 * h);
        CHECK(fd1 == doctest::Approx(cb.r1).epsilon(1e-5));
        CHECK(fd12 == doctest::Approx(cb.r12).epsilon(1e-4));
    }
}

TEST_CASE("ambient stationarity: r depends on the difference only") {
    EnergyLevel level = enumerate_level(25);
    UnitSpeedCurve a = build_unit_speed(CurveSpec::circle(0.45, 0.42, 0.2));
    UnitSpeedCurve b = build_unit_speed(CurveSpec::circle(0.58, 0.61, 0.2));
    GaussianStream rng(23, 0);
    for (int i = 0; i < 25; ++i) {
        double t1 = rng.next_unit() * a.length(), t2 = rng.next_unit() * a.length();
        CovarianceBundle ca = covariance_bundle(level, a, t1, t2);
        CovarianceBundle cb = covariance_bundle(level, b, t1, t2);
        CHECK(ca.r == doctest::Approx(cb.r).epsilon(1e-12));
        CHECK(ca.r12 == doctest::Approx(cb.r12).epsilon(1e-12));
    }
}

TEST_CASE("analytic covariance matches empirical covariance") {
    EnergyLevel level = enumerate_level(25);
    UnitSpeedCurve curve = build_unit_speed(CurveSpec::circle(0.5, 0.5, 0.2));
    double L = curve.length();

    GaussianStream pick(31, 0);
    const int pairs = 20;
    std::vector<double> t1s(pairs), t2s(pairs);
    for (int k = 0; k < pairs; ++k) {
        t1s[k] = pick.next_unit() * L;
        t2s[k] = pick.next_unit() * L;
    }

    const int trials = 10000;
    std::vector<KahanSum> prod(pairs);
    for (int trial = 0; trial < trials; ++trial) {
        WaveSample s = sample_coefficients(level, 77, trial);
        RestrictedProcess p;  // pointwise evaluation only
        p.level = &level;
        p.curve = &curve;
        p.coeffs = s.coeffs;
        for (int k = 0; k < pairs; ++k) prod[k].add(p.eval(t1s[k]) * p.eval(t2s[k]));
    }
    for (int k = 0; k < pairs; ++k) {
        double emp = prod[k].value() / trials;
        double exact = covariance_bundle(level, curve, t1s[k], t2s[k]).r;
        // Var(XY) <= 1 + r^2 <= 2 for unit Gaussians
        double se = std::sqrt(2.0 / trials);
        CHECK(std::abs(emp - exact) < 4.0 * se);
    }
}

TEST_CASE("f and f' empirically uncorrelated at equal time") {
    EnergyLevel level = enumerate_level(65);
    UnitSpeedCurve curve = build_unit_speed(CurveSpec::circle(0.5, 0.5, 0.2));
    const double t0 = 0.37;
    const int trials = 4000;
    KahanSum xy, xx, yy;
    for (int trial = 0; trial < trials; ++trial) {
        WaveSample s = sample_coefficients(level, 13, trial);
        RestrictedProcess p;
        p.level = &level;
        p.curve = &curve;
        p.coeffs = s.coeffs;
        double f = p.eval(t0), fp = p.eval_deriv(t0);
        xy.add(f * fp);
        xx.add(f * f);
        yy.add(fp * fp);
    }
    double corr = xy.value() / std::sqrt(xx.value() * yy.value());
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(trials)));
}
