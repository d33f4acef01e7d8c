#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "arw/common.hpp"

namespace arw {

/// 16-point Gauss-Legendre rule on [-1, 1] (positive half; rule is symmetric).
struct GaussLegendre16 {
    static constexpr int half = 8;
    static constexpr std::array<double, 8> abscissa = {
        0.0950125098376374401853, 0.2816035507792589132305,
        0.4580167776572273863424, 0.6178762444026437484467,
        0.7554044083550030338951, 0.8656312023878317438805,
        0.9445750230732325760780, 0.9894009349916499325962};
    static constexpr std::array<double, 8> weight = {
        0.1894506104550684962854, 0.1826034150449235888667,
        0.1691565193950025381893, 0.1495959888165767320815,
        0.1246289712555338720525, 0.0951585116824927848099,
        0.0622535239386478928628, 0.0271524594117540948518};
};

/// Composite 16-point Gauss-Legendre integral of f over [a, b] with `panels`
/// equal panels.
template <typename F>
double gl_integrate(F&& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    KahanSum acc;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double rad = 0.5 * h;
        for (int j = 0; j < GaussLegendre16::half; ++j) {
            const double dx = rad * GaussLegendre16::abscissa[j];
            const double w = rad * GaussLegendre16::weight[j];
            acc.add(w * (f(mid - dx) + f(mid + dx)));
        }
    }
    return acc.value();
}

/// Panel-doubling wrapper: doubles the panel count until two successive
/// composite estimates agree to `rel_tol` (relative to scale of the result).
template <typename F>
double gl_integrate_adaptive(F&& f, double a, double b, int panels0, double rel_tol,
                             int max_doublings = 6) {
    int panels = panels0;
    double prev = gl_integrate(f, a, b, panels);
    for (int d = 0; d < max_doublings; ++d) {
        panels *= 2;
        double cur = gl_integrate(f, a, b, panels);
        double scale = std::max({1e-300, std::abs(cur), std::abs(prev)});
        if (std::abs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    throw QuadratureNotConverged("gl_integrate_adaptive: no convergence after doublings");
}

/// Nodes and weights of the composite rule over [a, b].
inline void gl_nodes(double a, double b, int panels, std::vector<double>& t,
                     std::vector<double>& w) {
    const double h = (b - a) / panels;
    t.clear();
    w.clear();
    t.reserve(static_cast<std::size_t>(panels) * 16);
    w.reserve(static_cast<std::size_t>(panels) * 16);
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double rad = 0.5 * h;
        for (int j = GaussLegendre16::half - 1; j >= 0; --j) {
            t.push_back(mid - rad * GaussLegendre16::abscissa[j]);
            w.push_back(rad * GaussLegendre16::weight[j]);
        }
        for (int j = 0; j < GaussLegendre16::half; ++j) {
            t.push_back(mid + rad * GaussLegendre16::abscissa[j]);
            w.push_back(rad * GaussLegendre16::weight[j]);
        }
    }
}

}  // namespace arw
