#include "arw/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "arw/quadrature.hpp"

namespace arw {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kBasePanels = 256;  // 256 x 16 = 4096 default quadrature nodes

double wrap_pm_pi(double a) {
    while (a > M_PI) a -= kTwoPi;
    while (a < -M_PI) a += kTwoPi;
    return a;
}

}  // namespace

CurveSpec CurveSpec::circle(double cx, double cy, double radius) {
    CurveSpec s;
    s.family = CurveFamily::Circle;
    s.cx = cx;
    s.cy = cy;
    s.a = radius;
    return s;
}

CurveSpec CurveSpec::ellipse(double cx, double cy, double a, double b, double rotation) {
    CurveSpec s;
    s.family = CurveFamily::Ellipse;
    s.cx = cx;
    s.cy = cy;
    s.a = a;
    s.b = b;
    s.rotation = rotation;
    return s;
}

CurveSpec CurveSpec::flower(double cx, double cy, double r0, double eps, int k, double phase) {
    CurveSpec s;
    s.family = CurveFamily::Flower;
    s.cx = cx;
    s.cy = cy;
    s.a = r0;
    s.eps = eps;
    s.k = k;
    s.phase = phase;
    return s;
}

CurveSpec CurveSpec::arc(double cx, double cy, double radius, double angle0, double angle1) {
    CurveSpec s;
    s.family = CurveFamily::Arc;
    s.cx = cx;
    s.cy = cy;
    s.a = radius;
    s.angle0 = angle0;
    s.angle1 = angle1;
    return s;
}

double CurveSpec::u_begin() const { return family == CurveFamily::Arc ? angle0 : 0.0; }
double CurveSpec::u_end() const { return family == CurveFamily::Arc ? angle1 : kTwoPi; }

Vec2 CurveSpec::point(double u) const {
    double x = 0, y = 0;
    switch (family) {
        case CurveFamily::Circle:
        case CurveFamily::Arc:
            x = a * std::cos(u);
            y = a * std::sin(u);
            break;
        case CurveFamily::Ellipse:
            x = a * std::cos(u);
            y = b * std::sin(u);
            break;
        case CurveFamily::Flower: {
            double rho = a * (1.0 + eps * std::cos(k * u + phase));
            x = rho * std::cos(u);
            y = rho * std::sin(u);
            break;
        }
    }
    double c = std::cos(rotation), s = std::sin(rotation);
    return {cx + c * x - s * y, cy + s * x + c * y};
}

Vec2 CurveSpec::d1(double u) const {
    double x = 0, y = 0;
    switch (family) {
        case CurveFamily::Circle:
        case CurveFamily::Arc:
            x = -a * std::sin(u);
            y = a * std::cos(u);
            break;
        case CurveFamily::Ellipse:
            x = -a * std::sin(u);
            y = b * std::cos(u);
            break;
        case CurveFamily::Flower: {
            double rho = a * (1.0 + eps * std::cos(k * u + phase));
            double drho = -a * eps * k * std::sin(k * u + phase);
            x = drho * std::cos(u) - rho * std::sin(u);
            y = drho * std::sin(u) + rho * std::cos(u);
            break;
        }
    }
    double c = std::cos(rotation), s = std::sin(rotation);
    return {c * x - s * y, s * x + c * y};
}

Vec2 CurveSpec::d2(double u) const {
    double x = 0, y = 0;
    switch (family) {
        case CurveFamily::Circle:
        case CurveFamily::Arc:
            x = -a * std::cos(u);
            y = -a * std::sin(u);
            break;
        case CurveFamily::Ellipse:
            x = -a * std::cos(u);
            y = -b * std::sin(u);
            break;
        case CurveFamily::Flower: {
            double rho = a * (1.0 + eps * std::cos(k * u + phase));
            double drho = -a * eps * k * std::sin(k * u + phase);
            double ddrho = -a * eps * k * k * std::cos(k * u + phase);
            x = (ddrho - rho) * std::cos(u) - 2.0 * drho * std::sin(u);
            y = (ddrho - rho) * std::sin(u) + 2.0 * drho * std::cos(u);
            break;
        }
    }
    double c = std::cos(rotation), s = std::sin(rotation);
    return {c * x - s * y, s * x + c * y};
}

namespace {

double speed(const CurveSpec& spec, double u) {
    Vec2 d = spec.d1(u);
    return std::hypot(d.x, d.y);
}

double signed_curvature(const CurveSpec& spec, double u) {
    Vec2 d = spec.d1(u);
    Vec2 dd = spec.d2(u);
    double sp = std::hypot(d.x, d.y);
    return (d.x * dd.y - d.y * dd.x) / (sp * sp * sp);
}

}  // namespace

UnitSpeedCurve build_unit_speed(const CurveSpec& spec, double resolution) {
    UnitSpeedCurve curve;
    curve.spec_ = spec;
    curve.resolution_ = resolution;

    const double u0 = spec.u_begin();
    const double u1 = spec.u_end();
    if (!(u1 > u0)) throw Error("build_unit_speed: empty parameter range");
    if (spec.family == CurveFamily::Ellipse && !(spec.a > 0 && spec.b > 0))
        throw Error("build_unit_speed: ellipse needs positive semi-axes");

    // invariant scans: nowhere-vanishing speed and curvature, trace inside
    // the fundamental domain
    const int scan = 4096;
    double min_kappa = 1e300;
    double prev_kappa = 0.0;
    for (int i = 0; i <= scan; ++i) {
        double u = u0 + (u1 - u0) * i / scan;
        double sp = speed(spec, u);
        if (!(sp > 1e-12)) throw CurvatureVanishes("degenerate parametrization (zero speed)");
        double kappa = signed_curvature(spec, u);
        if (i > 0 && kappa * prev_kappa <= 0.0)
            throw CurvatureVanishes("curvature changes sign along the curve");
        prev_kappa = kappa;
        min_kappa = std::min(min_kappa, std::abs(kappa));
        Vec2 p = spec.point(u);
        if (p.x < 0.0 || p.x >= 1.0 || p.y < 0.0 || p.y >= 1.0)
            throw CurveExceedsDomain("curve leaves the fundamental domain [0,1)^2");
    }
    if (!(min_kappa > 1e-9))
        throw CurvatureVanishes("curvature vanishes somewhere along the curve");

    // cumulative arc length over u-panels, panel count doubled until the
    // total length is stable to 1e-12 relative
    int panels = 256;
    double prev_len = -1.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        curve.u_panel_.assign(panels + 1, 0.0);
        curve.s_panel_.assign(panels + 1, 0.0);
        KahanSum acc;
        for (int p = 0; p <= panels; ++p)
            curve.u_panel_[p] = u0 + (u1 - u0) * p / panels;
        for (int p = 0; p < panels; ++p) {
            double seg = gl_integrate([&](double u) { return speed(spec, u); },
                                      curve.u_panel_[p], curve.u_panel_[p + 1], 1);
            acc.add(seg);
            curve.s_panel_[p + 1] = acc.value();
        }
        double len = curve.s_panel_[panels];
        if (prev_len > 0 && std::abs(len - prev_len) <= 1e-12 * len) {
            curve.length_ = len;
            break;
        }
        prev_len = len;
        curve.length_ = len;
        panels *= 2;
    }

    // sample table with continuous tangent-angle lift
    int m = std::max(512, static_cast<int>(std::ceil(resolution * curve.length_)));
    curve.table_.resize(m + 1);
    double prev_phi = 0.0;
    for (int i = 0; i <= m; ++i) {
        double t = curve.length_ * i / m;
        double u = curve.u_of_t(t);
        Vec2 d = spec.d1(u);
        double raw = std::atan2(d.y, d.x);
        double phi = (i == 0) ? raw : prev_phi + wrap_pm_pi(raw - prev_phi);
        prev_phi = phi;
        curve.table_[i] = {t, u, phi, signed_curvature(spec, u), spec.point(u)};
    }
    return curve;
}

double UnitSpeedCurve::u_of_t(double t) const {
    t = std::clamp(t, 0.0, length_);
    // bracket by panel, then Newton on s(u) - t
    auto it = std::upper_bound(s_panel_.begin(), s_panel_.end(), t);
    std::size_t p = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
        0, std::distance(s_panel_.begin(), it) - 1));
    if (p >= u_panel_.size() - 1) p = u_panel_.size() - 2;

    double ua = u_panel_[p], ub = u_panel_[p + 1];
    double sa = s_panel_[p];
    double frac = (t - sa) / std::max(1e-300, s_panel_[p + 1] - sa);
    double u = ua + std::clamp(frac, 0.0, 1.0) * (ub - ua);
    for (int iter = 0; iter < 60; ++iter) {
        double s_u = sa + gl_integrate([&](double v) { return speed(spec_, v); }, ua, u, 1);
        double err = s_u - t;
        double sp = speed(spec_, u);
        double step = err / sp;
        u -= step;
        u = std::clamp(u, ua - (ub - ua), ub + (ub - ua));
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(u))) break;
    }
    return u;
}

Vec2 UnitSpeedCurve::position(double t) const { return spec_.point(u_of_t(t)); }

Vec2 UnitSpeedCurve::tangent(double t) const {
    Vec2 d = spec_.d1(u_of_t(t));
    double sp = std::hypot(d.x, d.y);
    return {d.x / sp, d.y / sp};
}

UnitSpeedCurve::PosTan UnitSpeedCurve::geometry(double t) const {
    double u = u_of_t(t);
    Vec2 d = spec_.d1(u);
    double sp = std::hypot(d.x, d.y);
    return {spec_.point(u), {d.x / sp, d.y / sp}};
}

double UnitSpeedCurve::lift_phi(double t, double raw) const {
    double step = length_ / static_cast<double>(table_.size() - 1);
    std::size_t i = std::min(table_.size() - 1,
                             static_cast<std::size_t>(std::max(0.0, std::round(t / step))));
    return table_[i].phi + wrap_pm_pi(raw - table_[i].phi);
}

double UnitSpeedCurve::tangent_angle(double t) const {
    Vec2 d = spec_.d1(u_of_t(t));
    return lift_phi(t, std::atan2(d.y, d.x));
}

double UnitSpeedCurve::curvature(double t) const {
    return signed_curvature(spec_, u_of_t(t));
}

UnitSpeedCurve::QuadGrid UnitSpeedCurve::build_grid(int panels) const {
    QuadGrid g;
    gl_nodes(0.0, length_, panels, g.t, g.w);
    g.phi.resize(g.t.size());
    g.pos.resize(g.t.size());
    g.tan.resize(g.t.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        double u = u_of_t(g.t[i]);
        Vec2 d = spec_.d1(u);
        double sp = std::hypot(d.x, d.y);
        double raw = std::atan2(d.y, d.x);
        double phi = (i == 0) ? lift_phi(g.t[i], raw) : prev + wrap_pm_pi(raw - prev);
        prev = phi;
        g.phi[i] = phi;
        g.pos[i] = spec_.point(u);
        g.tan[i] = {d.x / sp, d.y / sp};
    }
    return g;
}

const UnitSpeedCurve::QuadGrid& UnitSpeedCurve::quad(int level) const {
    std::lock_guard<std::mutex> lock(quads_mutex_);
    while (static_cast<int>(quads_.size()) <= level)
        quads_.push_back(build_grid(kBasePanels << quads_.size()));
    return quads_[static_cast<std::size_t>(level)];
}

UnitSpeedCurve::UnitSpeedCurve(const UnitSpeedCurve& other)
    : spec_(other.spec_),
      length_(other.length_),
      resolution_(other.resolution_),
      u_panel_(other.u_panel_),
      s_panel_(other.s_panel_),
      table_(other.table_),
      quads_(other.quads_) {}

UnitSpeedCurve& UnitSpeedCurve::operator=(const UnitSpeedCurve& other) {
    if (this != &other) {
        spec_ = other.spec_;
        length_ = other.length_;
        resolution_ = other.resolution_;
        u_panel_ = other.u_panel_;
        s_panel_ = other.s_panel_;
        table_ = other.table_;
        quads_ = other.quads_;
    }
    return *this;
}

UnitSpeedCurve::UnitSpeedCurve(UnitSpeedCurve&& other) noexcept
    : spec_(std::move(other.spec_)),
      length_(other.length_),
      resolution_(other.resolution_),
      u_panel_(std::move(other.u_panel_)),
      s_panel_(std::move(other.s_panel_)),
      table_(std::move(other.table_)),
      quads_(std::move(other.quads_)) {}

UnitSpeedCurve& UnitSpeedCurve::operator=(UnitSpeedCurve&& other) noexcept {
    if (this != &other) {
        spec_ = std::move(other.spec_);
        length_ = other.length_;
        resolution_ = other.resolution_;
        u_panel_ = std::move(other.u_panel_);
        s_panel_ = std::move(other.s_panel_);
        table_ = std::move(other.table_);
        quads_ = std::move(other.quads_);
    }
    return *this;
}

double UnitSpeedCurve::integrate(const std::function<double(double, double)>& f) const {
    double prev = 0.0;
    for (int level = 0; level < 4; ++level) {
        const QuadGrid& g = quad(level);
        KahanSum acc;
        for (std::size_t i = 0; i < g.t.size(); ++i) acc.add(g.w[i] * f(g.t[i], g.phi[i]));
        double cur = acc.value();
        if (level > 0) {
            double scale = std::max({1.0, std::abs(cur), std::abs(prev)});
            if (std::abs(cur - prev) <= 1e-10 * scale) return cur;
        }
        prev = cur;
    }
    return prev;
}

std::complex<double> I_gamma(const UnitSpeedCurve& curve) {
    double re = curve.integrate([](double, double phi) { return std::cos(2.0 * phi); });
    double im = curve.integrate([](double, double phi) { return std::sin(2.0 * phi); });
    return {re, im};
}

bool is_static(const UnitSpeedCurve& curve, double tol) {
    return std::abs(I_gamma(curve)) < tol * curve.length();
}

double directional_energy(const UnitSpeedCurve& curve, double theta) {
    return curve.integrate([theta](double, double phi) {
        double c = std::cos(phi - theta);
        return c * c;
    });
}

namespace {

// inner angular grid that integrates trig polynomials of degree <= 15
// exactly; B and A integrands have degree 4 in each angle
constexpr int kUniformAngles = 16;

std::vector<double> measure_angles(const SpectralMeasure& m) {
    if (m.kind == MeasureKind::Uniform) {
        std::vector<double> a(kUniformAngles);
        for (int j = 0; j < kUniformAngles; ++j) a[j] = kTwoPi * j / kUniformAngles;
        return a;
    }
    return m.angles;
}

std::vector<double> measure_weights(const SpectralMeasure& m) {
    if (m.kind == MeasureKind::Uniform)
        return std::vector<double>(kUniformAngles, 1.0 / kUniformAngles);
    return m.weights;
}

}  // namespace

double B_functional(const UnitSpeedCurve& curve, const SpectralMeasure& measure) {
    auto angles = measure_angles(measure);
    auto weights = measure_weights(measure);
    KahanSum acc;
    for (std::size_t j = 0; j < angles.size(); ++j) {
        double e = directional_energy(curve, angles[j]);
        acc.add(weights[j] * e * e);
    }
    return acc.value();
}

double A_functional(const UnitSpeedCurve& curve, const SpectralMeasure& measure) {
    auto angles = measure_angles(measure);
    auto weights = measure_weights(measure);
    const auto& g = curve.quad(1);  // 8192 nodes
    const std::size_t m = g.t.size();
    const std::size_t na = angles.size();

    // v[j][i] = cos^2(phi_i - theta_j)
    std::vector<std::vector<double>> v(na, std::vector<double>(m));
    for (std::size_t j = 0; j < na; ++j)
        for (std::size_t i = 0; i < m; ++i) {
            double c = std::cos(g.phi[i] - angles[j]);
            v[j][i] = c * c;
        }

    KahanSum acc;
    for (std::size_t j = 0; j < na; ++j) {
        for (std::size_t k = j; k < na; ++k) {
            KahanSum inner;
            for (std::size_t i = 0; i < m; ++i) inner.add(g.w[i] * v[j][i] * v[k][i]);
            double bjk = inner.value();
            double w = weights[j] * weights[k] * bjk * bjk;
            acc.add(k == j ? w : 2.0 * w);
        }
    }
    return acc.value();
}

double F_functional(const UnitSpeedCurve& curve, const EnergyLevel& level) {
    const auto& g = curve.quad(1);
    const std::size_t m = g.t.size();
    const std::size_t na = level.angles.size();

    std::vector<std::vector<double>> v(na, std::vector<double>(m));
    for (std::size_t j = 0; j < na; ++j)
        for (std::size_t i = 0; i < m; ++i) v[j][i] = std::cos(g.phi[i] - level.angles[j]);

    KahanSum acc;
    for (std::size_t j = 0; j < na; ++j) {
        for (std::size_t k = j; k < na; ++k) {
            KahanSum inner;
            for (std::size_t i = 0; i < m; ++i) inner.add(g.w[i] * v[j][i] * v[k][i]);
            double c = inner.value();
            acc.add((k == j ? 1.0 : 2.0) * c * c);
        }
    }
    double N = static_cast<double>(level.count);
    return acc.value() / (N * N);
}

FgProfiles fg_profiles(const UnitSpeedCurve& curve) {
    const auto& g = curve.quad(0);
    const std::size_t m = g.t.size();
    FgProfiles out;
    out.t = g.t;
    out.f.resize(m);
    out.g.resize(m);

    KahanSum mf, mg;
    for (std::size_t i = 0; i < m; ++i) {
        double c = g.tan[i].x, s = g.tan[i].y;
        out.f[i] = c * c;
        out.g[i] = c * s;
        mf.add(g.w[i] * out.f[i]);
        mg.add(g.w[i] * out.g[i]);
    }
    const double L = curve.length();
    const double fbar = mf.value() / L;
    const double gbar = mg.value() / L;
    KahanSum f2, fg, g2;
    for (std::size_t i = 0; i < m; ++i) {
        out.f[i] -= fbar;
        out.g[i] -= gbar;
        f2.add(g.w[i] * out.f[i] * out.f[i]);
        fg.add(g.w[i] * out.f[i] * out.g[i]);
        g2.add(g.w[i] * out.g[i] * out.g[i]);
    }
    out.int_f2 = f2.value();
    out.int_fg = fg.value();
    out.int_g2 = g2.value();
    return out;
}

LimitCoefficients limit_coefficients(const UnitSpeedCurve& curve, double mu_hat4) {
    if (!(std::abs(mu_hat4) <= 1.0))
        throw FourthCoefficientOutOfRange("|mu_hat(4)| must be <= 1");
    FgProfiles p = fg_profiles(curve);
    LimitCoefficients c;
    c.a1 = 2.0 * (1.0 + mu_hat4) * p.int_f2;
    c.a2 = 2.0 * (1.0 - mu_hat4) * p.int_f2;
    c.a3 = 4.0 * std::sqrt(std::max(0.0, 1.0 - mu_hat4 * mu_hat4)) * p.int_fg;
    return c;
}

std::string curve_identifier(const CurveSpec& spec) {
    std::ostringstream os;
    os.precision(12);
    switch (spec.family) {
        case CurveFamily::Circle:
            os << "circle(" << spec.cx << "," << spec.cy << ",r=" << spec.a << ")";
            break;
        case CurveFamily::Ellipse:
            os << "ellipse(" << spec.cx << "," << spec.cy << ",a=" << spec.a
               << ",b=" << spec.b << ",rot=" << spec.rotation << ")";
            break;
        case CurveFamily::Flower:
            os << "flower(" << spec.cx << "," << spec.cy << ",r0=" << spec.a
               << ",eps=" << spec.eps << ",k=" << spec.k << ",phase=" << spec.phase << ")";
            break;
        case CurveFamily::Arc:
            os << "arc(" << spec.cx << "," << spec.cy << ",r=" << spec.a << ","
               << spec.angle0 << ".." << spec.angle1 << ")";
            break;
    }
    return os.str();
}

CurveFunctionals curve_functionals(const UnitSpeedCurve& curve) {
    CurveFunctionals out;
    out.length = curve.length();
    out.I = I_gamma(curve);
    out.is_static = std::abs(out.I) < 1e-8 * curve.length();
    SpectralMeasure uni = SpectralMeasure::uniform();
    out.B_uniform = B_functional(curve, uni);
    out.A_uniform = A_functional(curve, uni);
    FgProfiles p = fg_profiles(curve);
    out.int_f2 = p.int_f2;
    out.int_fg = p.int_fg;
    out.int_g2 = p.int_g2;
    return out;
}

}  // namespace arw
