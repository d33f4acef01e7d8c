#include "arw/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

namespace arw {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

long long isqrt_ll(long long v) {
    if (v < 0) return -1;
    auto r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

// packs a small 2D vector into one key; tuple sums of <=6 points of norm
// sqrt(n) stay well inside the offset for any level we enumerate
std::uint64_t pack_key(long long x, long long y) {
    constexpr long long off = 1LL << 30;
    return (static_cast<std::uint64_t>(x + off) << 32) | static_cast<std::uint64_t>(y + off);
}

void unpack_key(std::uint64_t k, long long& x, long long& y) {
    constexpr long long off = 1LL << 30;
    x = static_cast<long long>(k >> 32) - off;
    y = static_cast<long long>(k & 0xffffffffULL) - off;
}

using SumCounts = std::unordered_map<std::uint64_t, long long>;

SumCounts fold_sums(const std::vector<LatticePoint>& pts, int m) {
    SumCounts counts;
    if (m == 2) {
        counts.reserve(pts.size() * pts.size());
        for (const auto& a : pts)
            for (const auto& b : pts) counts[pack_key(a.x + b.x, a.y + b.y)] += 1;
    } else {
        for (const auto& a : pts)
            for (const auto& b : pts)
                for (const auto& c : pts)
                    counts[pack_key(a.x + b.x + c.x, a.y + b.y + c.y)] += 1;
    }
    return counts;
}

}  // namespace

double EnergyLevel::alpha() const { return 2.0 * M_PI * M_PI * static_cast<double>(n); }

bool is_representable(long long n) {
    if (n < 0) return false;
    if (n == 0) return true;
    long long m = n;
    for (long long p = 2; p * p <= m; ++p) {
        if (m % p != 0) continue;
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (p % 4 == 3 && (e % 2) == 1) return false;
    }
    if (m > 1 && m % 4 == 3) return false;  // leftover prime factor to power 1
    return true;
}

EnergyLevel enumerate_level(long long n) {
    if (n <= 0 || !is_representable(n))
        throw NotRepresentable("n = " + std::to_string(n) + " is not a sum of two squares");

    EnergyLevel level;
    level.n = n;
    level.eigenvalue = 4.0 * M_PI * M_PI * static_cast<double>(n);

    const long long r = isqrt_ll(n);
    for (long long x = -r; x <= r; ++x) {
        long long y2 = n - x * x;
        long long y = isqrt_ll(y2);
        if (y * y != y2) continue;
        level.points.push_back({x, y});
        if (y != 0) level.points.push_back({x, -y});
    }
    std::sort(level.points.begin(), level.points.end(),
              [](const LatticePoint& a, const LatticePoint& b) {
                  double ta = std::atan2(static_cast<double>(a.y), static_cast<double>(a.x));
                  double tb = std::atan2(static_cast<double>(b.y), static_cast<double>(b.x));
                  if (ta < 0) ta += kTwoPi;
                  if (tb < 0) tb += kTwoPi;
                  return ta < tb;
              });
    level.count = static_cast<int>(level.points.size());

    const long long root = isqrt_ll(n);
    const bool square = root * root == n;
    for (const auto& p : level.points) {
        if (p.y > 0 || (square && p.x == root && p.y == 0)) level.half_points.push_back(p);
    }

    level.angles.reserve(level.points.size());
    for (const auto& p : level.points) {
        double a = std::atan2(static_cast<double>(p.y), static_cast<double>(p.x));
        if (a < 0) a += kTwoPi;
        level.angles.push_back(a);
    }
    level.half_angles.reserve(level.half_points.size());
    for (const auto& p : level.half_points) {
        double a = std::atan2(static_cast<double>(p.y), static_cast<double>(p.x));
        if (a < 0) a += kTwoPi;
        level.half_angles.push_back(a);
    }
    return level;
}

SpectralMeasure SpectralMeasure::uniform() {
    SpectralMeasure m;
    m.kind = MeasureKind::Uniform;
    m.fourth_coefficient = {0.0, 0.0};
    return m;
}

SpectralMeasure SpectralMeasure::atomic(std::vector<double> angles, std::vector<double> weights) {
    SpectralMeasure m;
    m.kind = MeasureKind::Atomic;
    m.angles = std::move(angles);
    m.weights = std::move(weights);
    m.fourth_coefficient = mu_hat(m, 4);
    return m;
}

SpectralMeasure SpectralMeasure::cilleruelo() {
    SpectralMeasure m = atomic({0.0, 0.5 * M_PI, M_PI, 1.5 * M_PI}, {0.25, 0.25, 0.25, 0.25});
    m.kind = MeasureKind::Cilleruelo;
    return m;
}

SpectralMeasure SpectralMeasure::tilted_cilleruelo() {
    SpectralMeasure m = atomic({0.25 * M_PI, 0.75 * M_PI, 1.25 * M_PI, 1.75 * M_PI},
                               {0.25, 0.25, 0.25, 0.25});
    m.kind = MeasureKind::TiltedCilleruelo;
    return m;
}

SpectralMeasure SpectralMeasure::from_level(const EnergyLevel& level) {
    std::vector<double> w(level.angles.size(), 1.0 / static_cast<double>(level.count));
    return atomic(level.angles, std::move(w));
}

SpectralMeasure spectral_measure(const EnergyLevel& level) {
    return SpectralMeasure::from_level(level);
}

std::complex<double> mu_hat(const SpectralMeasure& measure, int k) {
    if (measure.kind == MeasureKind::Uniform)
        return k == 0 ? std::complex<double>{1.0, 0.0} : std::complex<double>{0.0, 0.0};
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < measure.angles.size(); ++j) {
        double ph = -static_cast<double>(k) * measure.angles[j];
        acc += measure.weights[j] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return acc;
}

SeparationStats separation_stats(const EnergyLevel& level, double delta) {
    SeparationStats st;
    st.min_sep = std::numeric_limits<double>::infinity();
    const auto& pts = level.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double dx = static_cast<double>(pts[i].x - pts[j].x);
            double dy = static_cast<double>(pts[i].y - pts[j].y);
            st.min_sep = std::min(st.min_sep, std::hypot(dx, dy));
        }
    }
    st.is_delta_separated =
        st.min_sep >= std::pow(static_cast<double>(level.n), 0.25 + delta);
    return st;
}

long long spectral_correlations(const EnergyLevel& level, int order, int max_count) {
    if (order != 4 && order != 6) throw Error("spectral_correlations: order must be 4 or 6");
    if (level.count > max_count)
        throw LevelTooLarge("spectral_correlations: N exceeds cap " + std::to_string(max_count));

    auto counts = fold_sums(level.points, order / 2);
    long long total = 0;
    for (const auto& [key, c] : counts) {
        long long x, y;
        unpack_key(key, x, y);
        auto it = counts.find(pack_key(-x, -y));
        if (it != counts.end()) total += c * it->second;
    }
    return total;
}

OffdiagonalSums offdiagonal_sums(const EnergyLevel& level, int order, int max_count) {
    if (order != 4 && order != 6) throw Error("offdiagonal_sums: order must be 4 or 6");
    if (level.count > max_count)
        throw LevelTooLarge("offdiagonal_sums: N exceeds cap " + std::to_string(max_count));

    auto counts = fold_sums(level.points, order / 2);
    std::vector<std::pair<std::uint64_t, long long>> flat(counts.begin(), counts.end());

    OffdiagonalSums out;
    out.min_nonzero_norm = std::numeric_limits<double>::infinity();
    KahanSum rec;
    for (const auto& [ka, ca] : flat) {
        long long ax, ay;
        unpack_key(ka, ax, ay);
        for (const auto& [kb, cb] : flat) {
            long long bx, by;
            unpack_key(kb, bx, by);
            long long sx = ax + bx, sy = ay + by;
            if (sx == 0 && sy == 0) continue;
            double norm = std::hypot(static_cast<double>(sx), static_cast<double>(sy));
            out.min_nonzero_norm = std::min(out.min_nonzero_norm, norm);
            rec.add(static_cast<double>(ca) * static_cast<double>(cb) / norm);
        }
    }
    const double N = static_cast<double>(level.count);
    out.reciprocal_sum = rec.value() / (order == 4 ? N * N : N * N * N * N);
    return out;
}

double direction_identity_check(const EnergyLevel& level, const Vec2& z) {
    KahanSum acc;
    const double sqn = std::sqrt(static_cast<double>(level.n));
    for (const auto& p : level.points) {
        double ip = (z.x * static_cast<double>(p.x) + z.y * static_cast<double>(p.y)) / sqn;
        acc.add(ip * ip);
    }
    return acc.value() / static_cast<double>(level.count) - 0.5 * (z.x * z.x + z.y * z.y);
}

}  // namespace arw
