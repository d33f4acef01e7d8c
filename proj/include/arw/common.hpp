#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace arw {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ARW_DEFINE_ERROR(Name)                   \
    struct Name : Error {                        \
        using Error::Error;                      \
    }

ARW_DEFINE_ERROR(NotRepresentable);
ARW_DEFINE_ERROR(LevelTooLarge);
ARW_DEFINE_ERROR(CurvatureVanishes);
ARW_DEFINE_ERROR(CurveExceedsDomain);
ARW_DEFINE_ERROR(FourthCoefficientOutOfRange);
ARW_DEFINE_ERROR(RegimeMismatch);
ARW_DEFINE_ERROR(DegenerateDenominator);
ARW_DEFINE_ERROR(KernelNotPSD);
ARW_DEFINE_ERROR(NearDiagonal);
ARW_DEFINE_ERROR(NonPositiveDiscriminant);
ARW_DEFINE_ERROR(QuadratureNotConverged);
ARW_DEFINE_ERROR(RouteDisagreement);
ARW_DEFINE_ERROR(CampaignFailed);
ARW_DEFINE_ERROR(ConfigInvalid);

#undef ARW_DEFINE_ERROR

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// Order-independent compensated (Kahan) accumulator.
class KahanSum {
public:
    void add(double v) {
        double y = v - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

inline int worker_count() {
    if (const char* env = std::getenv("ARWAVE_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1) return w;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Static-chunked parallel map over [0, n). Worker count comes from the
/// ARWAVE_WORKERS environment variable; falls back to hardware concurrency.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    int workers = worker_count();
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += nw) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace arw
