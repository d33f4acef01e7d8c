#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "arw/common.hpp"
#include "arw/lattice.hpp"

namespace arw {

enum class CurveFamily { Circle, Ellipse, Flower, Arc };

/// Parametric family of reference curves inside the fundamental domain
/// [0,1)^2. All families have nowhere-vanishing curvature (enforced at
/// construction). `rotation` rigidly rotates the trace about its center.
struct CurveSpec {
    CurveFamily family = CurveFamily::Circle;
    double cx = 0.5, cy = 0.5;
    double a = 0.2;   // circle/arc radius, ellipse semi-major
    double b = 0.0;   // ellipse semi-minor
    double eps = 0.0; // flower modulation amplitude
    int k = 0;        // flower symmetry order
    double phase = 0.0;
    double rotation = 0.0;
    double angle0 = 0.0, angle1 = 0.0;  // arc span

    static CurveSpec circle(double cx, double cy, double radius);
    static CurveSpec ellipse(double cx, double cy, double a, double b, double rotation = 0.0);
    static CurveSpec flower(double cx, double cy, double r0, double eps, int k,
                            double phase = 0.0);
    static CurveSpec arc(double cx, double cy, double radius, double angle0, double angle1);

    bool closed() const { return family != CurveFamily::Arc; }

    // parametric position/derivatives in the base parameter u
    Vec2 point(double u) const;
    Vec2 d1(double u) const;
    Vec2 d2(double u) const;
    double u_begin() const;
    double u_end() const;
};

/// Arc-length parametrized curve with cached Gauss-Legendre quadrature grids.
///
/// Geometry queries invert the cumulative arc length back to the base
/// parameter (binary-search bracket + Newton), so positions and tangents are
/// accurate to machine precision at any t, not just at table nodes.
class UnitSpeedCurve {
public:
    UnitSpeedCurve() = default;
    UnitSpeedCurve(const UnitSpeedCurve& other);
    UnitSpeedCurve& operator=(const UnitSpeedCurve& other);
    UnitSpeedCurve(UnitSpeedCurve&& other) noexcept;
    UnitSpeedCurve& operator=(UnitSpeedCurve&& other) noexcept;

    struct QuadGrid {
        std::vector<double> t, w;     // nodes and weights on [0, L]
        std::vector<double> phi;      // lifted tangent angle at nodes
        std::vector<Vec2> pos, tan;
    };

    struct Sample {
        double t, u, phi, kappa;
        Vec2 pos;
    };

    double length() const { return length_; }
    bool closed() const { return spec_.closed(); }
    const CurveSpec& spec() const { return spec_; }
    double resolution() const { return resolution_; }
    const std::vector<Sample>& samples() const { return table_; }

    Vec2 position(double t) const;
    Vec2 tangent(double t) const;
    double tangent_angle(double t) const;  // continuous lift of arg(tangent)
    double curvature(double t) const;

    struct PosTan {
        Vec2 pos, tan;
    };
    /// Position and unit tangent with a single arc-length inversion.
    PosTan geometry(double t) const;

    /// level 0 has 4096 nodes (256 panels x 16); each level doubles.
    const QuadGrid& quad(int level = 0) const;

    /// Integrates f over [0, L] on successive grids until the change is
    /// below 1e-10 relative.
    double integrate(const std::function<double(double t, double phi)>& f) const;

    friend UnitSpeedCurve build_unit_speed(const CurveSpec& spec, double resolution);

private:
    double u_of_t(double t) const;
    double lift_phi(double t, double raw) const;
    QuadGrid build_grid(int panels) const;

    CurveSpec spec_;
    double length_ = 0.0;
    double resolution_ = 0.0;
    std::vector<double> u_panel_, s_panel_;  // cumulative arc length per u-panel
    std::vector<Sample> table_;
    mutable std::vector<QuadGrid> quads_;
    mutable std::mutex quads_mutex_;
};

/// Builds the unit-speed representation. `resolution` is the sample-table
/// density per unit arc length. Throws CurvatureVanishes or
/// CurveExceedsDomain when the CurveSpec invariants fail.
UnitSpeedCurve build_unit_speed(const CurveSpec& spec, double resolution = 2048.0);

std::complex<double> I_gamma(const UnitSpeedCurve& curve);

bool is_static(const UnitSpeedCurve& curve, double tol = 1e-8);

/// E(gamma; theta) = int <theta, gamma'(t)>^2 dt for a unit direction at
/// angle theta.
double directional_energy(const UnitSpeedCurve& curve, double theta);

double B_functional(const UnitSpeedCurve& curve, const SpectralMeasure& measure);
double A_functional(const UnitSpeedCurve& curve, const SpectralMeasure& measure);
double F_functional(const UnitSpeedCurve& curve, const EnergyLevel& level);

struct FgProfiles {
    std::vector<double> t;    // quad nodes
    std::vector<double> f, g; // zero-mean profiles at nodes
    double int_f2 = 0.0;
    double int_fg = 0.0;
    double int_g2 = 0.0;
};

FgProfiles fg_profiles(const UnitSpeedCurve& curve);

struct LimitCoefficients {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;
};

/// a1 = 2(1+mu4) int f^2, a2 = 2(1-mu4) int f^2, a3 = 4 sqrt(1-mu4^2) int fg.
LimitCoefficients limit_coefficients(const UnitSpeedCurve& curve, double mu_hat4);

/// One-stop bundle for reporting.
struct CurveFunctionals {
    double length = 0.0;
    std::complex<double> I{0.0, 0.0};
    bool is_static = false;
    double B_uniform = 0.0;
    double A_uniform = 0.0;
    double int_f2 = 0.0, int_fg = 0.0, int_g2 = 0.0;
};

CurveFunctionals curve_functionals(const UnitSpeedCurve& curve);

/// Stable human-readable identifier of a curve specification.
std::string curve_identifier(const CurveSpec& spec);

}  // namespace arw
