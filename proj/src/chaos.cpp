#include "arw/chaos.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "arw/quadrature.hpp"

namespace arw {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double hermite(int k, double x) {
    if (k < 0) throw Error("hermite: negative order");
    double hm1 = 0.0, h = 1.0;
    for (int j = 1; j <= k; ++j) {
        double next = x * h - (j - 1) * hm1;
        hm1 = h;
        h = next;
    }
    return h;
}

ChaosCoefficients chaos_coefficients(int max_q) {
    ChaosCoefficients c;
    c.b.resize(max_q + 1);
    c.a.resize(max_q + 1);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(kTwoPi);
    const double sqrt_2_over_pi = std::sqrt(2.0 / M_PI);
    double fact2q = 1.0;  // (2q)!
    double pow2 = 1.0;    // 2^l
    double factl = 1.0;   // l!
    for (int q = 0; q <= max_q; ++q) {
        if (q > 0) fact2q *= (2.0 * q - 1.0) * (2.0 * q);
        c.b[q] = hermite(2 * q, 0.0) / fact2q * inv_sqrt_2pi;
        if (q > 0) {
            pow2 *= 2.0;
            factl *= q;
        }
        double sign = (q % 2 == 0) ? -1.0 : 1.0;  // (-1)^{l+1}
        c.a[q] = sqrt_2_over_pi * sign / (pow2 * factl * (2.0 * q - 1.0));
    }
    return c;
}

ChaosProjector::ChaosProjector(const EnergyLevel& level, const UnitSpeedCurve& curve)
    : level_(&level), curve_(&curve) {
    static_ = is_static(curve);
    const double L = curve.length();
    const double n = static_cast<double>(level.n);
    const double N = static_cast<double>(level.count);
    z0_ = std::sqrt(2.0 * n) * L;

    SpectralMeasure mu = spectral_measure(level);
    B_ = B_functional(curve, mu);
    A_ = A_functional(curve, mu);
    F_ = F_functional(curve, level);

    // the off-diagonal oscillatory integrals see frequencies up to
    // 2 pi |lambda - lambda'| <= 4 pi sqrt(n); pick a grid that resolves them
    quad_level_ = 0;
    double need = 12.0 * 2.0 * std::sqrt(n) * L;
    while (quad_level_ < 5 && 4096.0 * (1 << quad_level_) < need) ++quad_level_;
    const auto& g = curve.quad(quad_level_);
    const std::size_t m = g.t.size();
    const std::size_t H = level.half_points.size();

    // e_lambda(t) = 2 <lambda/|lambda|, gamma'(t)>^2 on the quad grid
    w2_basis_.resize(H * m);
    for (std::size_t j = 0; j < H; ++j) {
        double th = level.half_angles[j];
        for (std::size_t i = 0; i < m; ++i) {
            double c = std::cos(g.phi[i] - th);
            w2_basis_[j * m + i] = 2.0 * c * c;
        }
    }

    d_.resize(H);
    e_int_.resize(H);
    for (std::size_t j = 0; j < H; ++j) {
        KahanSum acc;
        for (std::size_t i = 0; i < m; ++i) acc.add(g.w[i] * w2_basis_[j * m + i]);
        e_int_[j] = acc.value();
        d_[j] = e_int_[j] - L;
    }

    p2_.resize(H * H);
    for (std::size_t j = 0; j < H; ++j) {
        for (std::size_t k = j; k < H; ++k) {
            KahanSum acc;
            for (std::size_t i = 0; i < m; ++i)
                acc.add(g.w[i] * w2_basis_[j * m + i] * w2_basis_[k * m + i]);
            p2_[j * H + k] = acc.value();
            p2_[k * H + j] = acc.value();
        }
    }

    {
        KahanSum acc;  // (4/N) sum over the full lattice of int <.,.>^4
        for (std::size_t j = 0; j < H; ++j) {
            KahanSum inner;
            double th = level.half_angles[j];
            for (std::size_t i = 0; i < m; ++i) {
                double c = std::cos(g.phi[i] - th);
                inner.add(g.w[i] * c * c * c * c);
            }
            acc.add(inner.value());
        }
        q4_ = 8.0 * acc.value() / N;  // half-sum doubled
    }

    // index of each full lattice point into the half set (with conjugation)
    const std::size_t full0 = level.points.size();
    full_index_.resize(full0);
    for (std::size_t k = 0; k < full0; ++k) {
        for (std::size_t j = 0; j < H; ++j) {
            const auto& hp = level.half_points[j];
            if (level.points[k].x == hp.x && level.points[k].y == hp.y) {
                full_index_[k] = {j, false};
                break;
            }
            if (level.points[k].x == -hp.x && level.points[k].y == -hp.y) {
                full_index_[k] = {j, true};
                break;
            }
        }
    }

    // oscillatory pair integrals for the off-diagonal second chaos
    const std::size_t full = level.points.size();
    osc_.assign(full * full, {0.0, 0.0});
    std::vector<double> psi(full * m);
    for (std::size_t j = 0; j < full; ++j) {
        double lx = static_cast<double>(level.points[j].x);
        double ly = static_cast<double>(level.points[j].y);
        for (std::size_t i = 0; i < m; ++i)
            psi[j * m + i] = kTwoPi * (lx * g.pos[i].x + ly * g.pos[i].y);
    }
    parallel_for(full, [&](std::size_t j) {
        for (std::size_t k = 0; k < full; ++k) {
            if (k == j) continue;
            double thj = level.angles[j], thk = level.angles[k];
            KahanSum re, im;
            for (std::size_t i = 0; i < m; ++i) {
                double amp =
                    2.0 * std::cos(g.phi[i] - thj) * std::cos(g.phi[i] - thk) - 1.0;
                double ph = psi[j * m + i] - psi[k * m + i];
                re.add(g.w[i] * amp * std::cos(ph));
                im.add(g.w[i] * amp * std::sin(ph));
            }
            osc_[j * full + k] = {re.value(), im.value()};
        }
    });
}

Projection2 ChaosProjector::project_2(const WaveSample& sample) const {
    const double n = static_cast<double>(level_->n);
    const double N = static_cast<double>(level_->count);
    const std::size_t H = level_->half_points.size();

    Projection2 out;
    KahanSum za;
    for (std::size_t j = 0; j < H; ++j)
        za.add((std::norm(sample.coeffs[j]) - 1.0) * d_[j]);
    out.z2a = std::sqrt(0.5 * n) * (2.0 / N) * za.value();

    // full coefficient map via a_{-lambda} = conj(a_lambda)
    const std::size_t full = level_->points.size();
    std::vector<std::complex<double>> a(full);
    for (std::size_t k = 0; k < full; ++k) {
        auto [j, conj] = full_index_[k];
        a[k] = conj ? std::conj(sample.coeffs[j]) : sample.coeffs[j];
    }
    std::complex<double> zb{0.0, 0.0};
    for (std::size_t j = 0; j < full; ++j)
        for (std::size_t k = 0; k < full; ++k) {
            if (k == j) continue;
            zb += a[j] * std::conj(a[k]) * osc_[j * full + k];
        }
    out.z2b = std::sqrt(0.5 * n) * zb.real() / N;
    return out;
}

WFunctionals ChaosProjector::W_functionals(const WaveSample& sample, bool with_profile) const {
    const std::size_t H = level_->half_points.size();
    const double L = curve_->length();
    const double scale = 1.0 / std::sqrt(0.5 * static_cast<double>(level_->count));

    WFunctionals out;
    KahanSum w1, iw2;
    for (std::size_t j = 0; j < H; ++j) {
        double c = std::norm(sample.coeffs[j]) - 1.0;
        w1.add(c);
        iw2.add(c * e_int_[j]);
    }
    out.W1 = scale * w1.value();
    out.int_W2 = scale * iw2.value();
    out.identity_residual = out.int_W2 / L - out.W1;

    if (with_profile) {
        const auto& g = curve_->quad(quad_level_);
        out.W2_profile.assign(g.t.size(), 0.0);
        for (std::size_t j = 0; j < H; ++j) {
            double c = scale * (std::norm(sample.coeffs[j]) - 1.0);
            for (std::size_t i = 0; i < g.t.size(); ++i)
                out.W2_profile[i] += c * w2_basis_[j * g.t.size() + i];
        }
    }
    return out;
}

Projection4 ChaosProjector::project_4(const WaveSample& sample, double route_tol) const {
    const double n = static_cast<double>(level_->n);
    const double N = static_cast<double>(level_->count);
    const double L = curve_->length();
    const std::size_t H = level_->half_points.size();

    std::vector<double> c(H);
    for (std::size_t j = 0; j < H; ++j) c[j] = std::norm(sample.coeffs[j]) - 1.0;

    WFunctionals wf = W_functionals(sample);

    // int W2^2 = (2/N) sum_{j,k} c_j c_k int e_j e_k
    KahanSum q;
    for (std::size_t j = 0; j < H; ++j) {
        const double* row = &p2_[j * H];
        double inner = 0.0;
        for (std::size_t k = 0; k < H; ++k) inner += c[k] * row[k];
        q.add(c[j] * inner);
    }
    const double int_W2_sq = (2.0 / N) * q.value();

    const double X = (6.0 * L / N) * (wf.W1 * wf.W1 - 1.0);
    const double Y = (6.0 / N) * (int_W2_sq - q4_);
    const double Z = (2.0 / N) * (wf.W1 * wf.int_W2 - L);

    Projection4 out;
    out.z4a = std::sqrt(2.0 * n) / 24.0 * (3.0 * X - Y - 6.0 * Z);
    double centered = int_W2_sq - wf.int_W2 * wf.int_W2 / L;
    out.z4a_static = std::sqrt(2.0 * n) / (4.0 * N) * (-centered + q4_ - L);

    if (static_) {
        double scale = std::max({1.0, std::abs(out.z4a), std::abs(out.z4a_static)});
        if (std::abs(out.z4a - out.z4a_static) > route_tol * scale)
            throw RouteDisagreement("fourth-chaos routes disagree on a static curve");
    }
    return out;
}

double ChaosProjector::predicted_var_z2a() const {
    const double n = static_cast<double>(level_->n);
    const double N = static_cast<double>(level_->count);
    const double L = curve_->length();
    return n / N * (4.0 * B_ - L * L);
}

double ChaosProjector::predicted_var_z4a() const {
    const double n = static_cast<double>(level_->n);
    const double N = static_cast<double>(level_->count);
    const double L = curve_->length();
    return n / (4.0 * N * N) * (16.0 * A_ + 24.0 * B_ - 7.0 * L * L);
}

Projection2 project_2(const WaveSample& sample, const UnitSpeedCurve& curve) {
    return ChaosProjector(*sample.level, curve).project_2(sample);
}

WFunctionals W_functionals(const WaveSample& sample, const UnitSpeedCurve& curve) {
    return ChaosProjector(*sample.level, curve).W_functionals(sample, true);
}

Projection4 project_4(const WaveSample& sample, const UnitSpeedCurve& curve) {
    return ChaosProjector(*sample.level, curve).project_4(sample);
}

namespace {

double mu4_real(const SpectralMeasure& measure) {
    std::complex<double> m4 = mu_hat(measure, 4);
    return m4.real();
}

}  // namespace

MLawSpec m_law_unreconciled(const UnitSpeedCurve& curve, const SpectralMeasure& measure) {
    double mu4 = mu4_real(measure);
    LimitCoefficients c = limit_coefficients(curve, mu4);
    double L = curve.length();
    MLawSpec spec;
    spec.a1 = c.a1;
    spec.a2 = c.a2;
    spec.a3 = c.a3;
    spec.denom = 16.0 * A_functional(curve, measure) - L * L;
    return spec;
}

MLawSpec m_law_reconciled(const UnitSpeedCurve& curve, const SpectralMeasure& measure) {
    double mu4 = mu4_real(measure);
    if (!(std::abs(mu4) <= 1.0))
        throw FourthCoefficientOutOfRange("|mu_hat(4)| must be <= 1");
    FgProfiles p = fg_profiles(curve);
    double L = curve.length();
    MLawSpec spec;
    spec.a1 = -2.0 * (1.0 + mu4) * p.int_f2;
    spec.a2 = -2.0 * (1.0 - mu4) * p.int_g2;
    spec.a3 = -4.0 * std::sqrt(std::max(0.0, 1.0 - mu4 * mu4)) * p.int_fg;
    spec.denom = 2.0 * (16.0 * A_functional(curve, measure) - L * L);
    return spec;
}

double sample_limit_M(const MLawSpec& spec, GaussianStream& rng) {
    if (!(spec.denom > 0.0))
        throw DegenerateDenominator("limit law denominator must be positive");
    double z1 = rng.next();
    double z2 = rng.next();
    return (spec.a1 * (z1 * z1 - 1.0) + spec.a2 * (z2 * z2 - 1.0) + spec.a3 * z1 * z2) /
           std::sqrt(spec.denom);
}

double sample_limit_M(const LimitCoefficients& coeffs, double denom, GaussianStream& rng) {
    MLawSpec spec{coeffs.a1, coeffs.a2, coeffs.a3, denom};
    return sample_limit_M(spec, rng);
}

LimitLawSamplerI::LimitLawSamplerI(const UnitSpeedCurve& curve, const SpectralMeasure& measure,
                                   int grid_size) {
    L_ = curve.length();
    double denom_half = 16.0 * A_functional(curve, measure) - L_ * L_;
    if (!(denom_half > 0.0))
        throw DegenerateDenominator("16A - L^2 must be positive for the I(mu) law");
    denom_ = 2.0 * denom_half;

    // grid doubling: stop once the deterministic mean of the functional is
    // stable to 1e-3
    double prev_mean = 0.0;
    int size = grid_size;
    for (int attempt = 0;; ++attempt) {
        factor_kernel(curve, measure, size);
        double mean = functional_mean();
        if (attempt > 0 && std::abs(mean - prev_mean) < 1e-3) break;
        if (attempt >= 4)
            throw QuadratureNotConverged("I(mu) grid did not stabilize the functional mean");
        prev_mean = mean;
        size *= 2;
    }
}

void LimitLawSamplerI::factor_kernel(const UnitSpeedCurve& curve,
                                     const SpectralMeasure& measure, int grid_size) {
    // composite Gauss-Legendre grid over [0, L]
    int panels = std::max(1, grid_size / 16);
    gl_nodes(0.0, L_, panels, tq_, wq_);
    const std::size_t m = tq_.size();

    std::vector<double> phi(m);
    for (std::size_t i = 0; i < m; ++i) phi[i] = curve.tangent_angle(tq_[i]);

    std::vector<double> angles;
    std::vector<double> weights;
    if (measure.kind == MeasureKind::Uniform) {
        const int na = 64;
        for (int j = 0; j < na; ++j) {
            angles.push_back(kTwoPi * j / na);
            weights.push_back(1.0 / na);
        }
    } else {
        angles = measure.angles;
        weights = measure.weights;
    }

    // k(s,t) = 4 sum_j w_j q_j(s) q_j(t), q_j(t) = <theta_j, gamma'(t)>^2
    Eigen::MatrixXd K(m, m);
    std::vector<std::vector<double>> qv(angles.size(), std::vector<double>(m));
    for (std::size_t j = 0; j < angles.size(); ++j)
        for (std::size_t i = 0; i < m; ++i) {
            double cc = std::cos(phi[i] - angles[j]);
            qv[j][i] = cc * cc;
        }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = i; k < m; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < angles.size(); ++j)
                acc += weights[j] * qv[j][i] * qv[j][k];
            K(i, k) = 4.0 * acc;
            K(k, i) = K(i, k);
        }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    if (es.info() != Eigen::Success) throw Error("kernel eigendecomposition failed");
    const auto& vals = es.eigenvalues();
    double vmax = std::max(1.0, vals.maxCoeff());
    modes_.clear();
    rank_ = 0;
    for (Eigen::Index j = vals.size() - 1; j >= 0; --j) {
        double lam = vals(j);
        if (lam < -1e-10 * vmax)
            throw KernelNotPSD("kernel eigenvalue below the clip threshold");
        if (lam <= 1e-14 * vmax) continue;  // clip
        double s = std::sqrt(lam);
        for (std::size_t i = 0; i < m; ++i) modes_.push_back(s * es.eigenvectors()(i, j));
        ++rank_;
    }

    // deterministic term 4 int int <theta, gamma'>^4 dt dmu - L
    KahanSum det;
    for (std::size_t j = 0; j < angles.size(); ++j) {
        KahanSum inner;
        for (std::size_t i = 0; i < m; ++i) inner.add(wq_[i] * qv[j][i] * qv[j][i]);
        det.add(weights[j] * inner.value());
    }
    det_term_ = 4.0 * det.value() - L_;
}

double LimitLawSamplerI::functional_mean() const {
    // E[-int (W2 - mean)^2] + det term, from the kernel trace
    const std::size_t m = tq_.size();
    KahanSum trace, total;
    std::vector<double> row_int(m, 0.0);
    for (std::size_t r = 0; r < rank_; ++r) {
        const double* v = &modes_[r * m];
        KahanSum mean_r;
        for (std::size_t i = 0; i < m; ++i) {
            trace.add(wq_[i] * v[i] * v[i]);
            mean_r.add(wq_[i] * v[i]);
        }
        total.add(mean_r.value() * mean_r.value());
    }
    double e_int_sq = trace.value() - total.value() / L_;
    return -e_int_sq + det_term_;
}

double LimitLawSamplerI::draw(GaussianStream& rng) const {
    const std::size_t m = tq_.size();
    std::vector<double> w2(m, 0.0);
    for (std::size_t r = 0; r < rank_; ++r) {
        double xi = rng.next();
        const double* v = &modes_[r * m];
        for (std::size_t i = 0; i < m; ++i) w2[i] += xi * v[i];
    }
    KahanSum mean;
    for (std::size_t i = 0; i < m; ++i) mean.add(wq_[i] * w2[i]);
    double bar = mean.value() / L_;
    KahanSum sq;
    for (std::size_t i = 0; i < m; ++i) {
        double d = w2[i] - bar;
        sq.add(wq_[i] * d * d);
    }
    return (-sq.value() + det_term_) / std::sqrt(denom_);
}

double sample_limit_I(const LimitLawSamplerI& sampler, GaussianStream& rng) {
    return sampler.draw(rng);
}

SigmaNDiagonalization diagonalize_N(double mu_hat4) {
    if (!(std::abs(mu_hat4) <= 1.0))
        throw FourthCoefficientOutOfRange("|mu_hat(4)| must be <= 1");
    SigmaNDiagonalization out;
    double m = mu_hat4;
    out.sigma = {{{(3.0 + m) / 8.0, (1.0 - m) / 8.0, 0.0},
                  {(1.0 - m) / 8.0, (3.0 + m) / 8.0, 0.0},
                  {0.0, 0.0, (1.0 - m) / 8.0}}};

    Eigen::Matrix3d S;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) S(i, j) = out.sigma[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S);
    for (int i = 0; i < 3; ++i) out.eigenvalues_numeric[i] = es.eigenvalues()(2 - i);

    out.eigenvalues_closed_form = {(1.0 + m) / 4.0, 0.5, (1.0 - m) / 8.0};
    std::sort(out.eigenvalues_closed_form.begin(), out.eigenvalues_closed_form.end(),
              std::greater<double>());
    return out;
}

}  // namespace arw
