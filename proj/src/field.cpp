#include "arw/field.hpp"

#include <cmath>

#include "arw/rng.hpp"

namespace arw {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

WaveSample sample_coefficients(const EnergyLevel& level, std::uint64_t seed,
                               std::uint64_t trial) {
    WaveSample s;
    s.level = &level;
    s.seed = seed;
    s.trial = trial;
    GaussianStream rng(seed, trial);
    s.coeffs.reserve(level.half_points.size());
    for (std::size_t j = 0; j < level.half_points.size(); ++j)
        s.coeffs.push_back(rng.next_complex());
    return s;
}

double evaluate_wave(const WaveSample& sample, const Vec2& x) {
    const EnergyLevel& level = *sample.level;
    KahanSum acc;
    for (std::size_t j = 0; j < level.half_points.size(); ++j) {
        const auto& p = level.half_points[j];
        double ph = kTwoPi * (static_cast<double>(p.x) * x.x + static_cast<double>(p.y) * x.y);
        // a e_lambda + conj(a) e_{-lambda} = 2 Re a cos - 2 Im a sin
        acc.add(2.0 * (sample.coeffs[j].real() * std::cos(ph) -
                       sample.coeffs[j].imag() * std::sin(ph)));
    }
    return acc.value() / std::sqrt(static_cast<double>(level.count));
}

double RestrictedProcess::eval(double at) const {
    KahanSum acc;
    Vec2 g = curve->position(at);
    for (std::size_t j = 0; j < level->half_points.size(); ++j) {
        const auto& p = level->half_points[j];
        double ph = kTwoPi * (static_cast<double>(p.x) * g.x + static_cast<double>(p.y) * g.y);
        acc.add(2.0 * (coeffs[j].real() * std::cos(ph) - coeffs[j].imag() * std::sin(ph)));
    }
    return acc.value() / std::sqrt(static_cast<double>(level->count));
}

double RestrictedProcess::eval_deriv(double at) const {
    KahanSum acc;
    Vec2 g = curve->position(at);
    Vec2 tg = curve->tangent(at);
    for (std::size_t j = 0; j < level->half_points.size(); ++j) {
        const auto& p = level->half_points[j];
        double lx = static_cast<double>(p.x), ly = static_cast<double>(p.y);
        double ph = kTwoPi * (lx * g.x + ly * g.y);
        double dph = kTwoPi * (lx * tg.x + ly * tg.y);
        acc.add(-2.0 * dph *
                (coeffs[j].real() * std::sin(ph) + coeffs[j].imag() * std::cos(ph)));
    }
    return acc.value() / std::sqrt(static_cast<double>(level->count));
}

RestrictedGrid::RestrictedGrid(const EnergyLevel& level, const UnitSpeedCurve& curve,
                               double samples_per_wavelength)
    : level_(&level), curve_(&curve), spw_(samples_per_wavelength) {
    const double L = curve.length();
    const double sqrtE = std::sqrt(level.eigenvalue);
    // grid spacing <= (1 / spw) * (1 / sqrt(E_n))
    auto m = static_cast<std::size_t>(std::ceil(L * spw_ * sqrtE));
    t_.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) t_[i] = L * static_cast<double>(i) / m;

    half_ = level.half_points.size();
    cos_.resize(t_.size() * half_);
    sin_.resize(t_.size() * half_);
    dphase_.resize(t_.size() * half_);
    for (std::size_t i = 0; i < t_.size(); ++i) {
        Vec2 g = curve.position(t_[i]);
        Vec2 tg = curve.tangent(t_[i]);
        for (std::size_t j = 0; j < half_; ++j) {
            const auto& p = level.half_points[j];
            double lx = static_cast<double>(p.x), ly = static_cast<double>(p.y);
            double ph = kTwoPi * (lx * g.x + ly * g.y);
            cos_[i * half_ + j] = std::cos(ph);
            sin_[i * half_ + j] = std::sin(ph);
            dphase_[i * half_ + j] = kTwoPi * (lx * tg.x + ly * tg.y);
        }
    }
}

RestrictedProcess RestrictedGrid::realize(const WaveSample& sample) const {
    RestrictedProcess out;
    out.level = level_;
    out.curve = curve_;
    out.coeffs = sample.coeffs;
    out.t = t_;
    out.f.resize(t_.size());
    out.fp.resize(t_.size());
    const double norm = 2.0 / std::sqrt(static_cast<double>(level_->count));
    for (std::size_t i = 0; i < t_.size(); ++i) {
        double acc = 0.0, accd = 0.0;
        const double* c = &cos_[i * half_];
        const double* s = &sin_[i * half_];
        const double* d = &dphase_[i * half_];
        for (std::size_t j = 0; j < half_; ++j) {
            const double re = sample.coeffs[j].real();
            const double im = sample.coeffs[j].imag();
            acc += re * c[j] - im * s[j];
            accd += -d[j] * (re * s[j] + im * c[j]);
        }
        out.f[i] = norm * acc;
        out.fp[i] = norm * accd;
    }
    return out;
}

RestrictedProcess evaluate_restricted(const WaveSample& sample, const UnitSpeedCurve& curve,
                                      double samples_per_wavelength) {
    RestrictedGrid grid(*sample.level, curve, samples_per_wavelength);
    return grid.realize(sample);
}

CovarianceBundle covariance_bundle(const EnergyLevel& level, const UnitSpeedCurve& curve,
                                   double t1, double t2) {
    Vec2 g1 = curve.position(t1), g2 = curve.position(t2);
    Vec2 d1 = curve.tangent(t1), d2 = curve.tangent(t2);
    KahanSum r, r1, r2v, r12;
    for (const auto& p : level.points) {
        double lx = static_cast<double>(p.x), ly = static_cast<double>(p.y);
        double ph = kTwoPi * (lx * (g1.x - g2.x) + ly * (g1.y - g2.y));
        double c = std::cos(ph), s = std::sin(ph);
        double a1 = kTwoPi * (lx * d1.x + ly * d1.y);
        double a2 = kTwoPi * (lx * d2.x + ly * d2.y);
        r.add(c);
        r1.add(-s * a1);
        r2v.add(s * a2);
        r12.add(c * a1 * a2);
    }
    const double N = static_cast<double>(level.count);
    return {r.value() / N, r1.value() / N, r2v.value() / N, r12.value() / N};
}

}  // namespace arw
