#pragma once
// Small shared vocabulary: fixed-size vectors, error type, thread cap.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace thinfilm {

inline constexpr double pi = std::numbers::pi;

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;  // row j is D_j

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm2(const Vec2& a) { return dot(a, a); }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// planar wedge a ^ b = a1 b2 - a2 b1
inline double wedge(double a1, double a2, double b1, double b2) { return a1 * b2 - a2 * b1; }

// wraps an angle difference into (-pi, pi]
inline double wrap_angle(double d) {
    d = std::remainder(d, 2.0 * pi);
    if (d <= -pi) d += 2.0 * pi;
    return d;
}

// Seeded generator whose doubles depend only on the mt19937_64 bit stream,
// so results are reproducible across standard libraries.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal() {  // Box-Muller
        double u = uniform(), v = uniform();
        return std::sqrt(-2.0 * std::log1p(-u)) * std::cos(2.0 * pi * v);
    }
};

// Honors THINFILM_THREADS; falls back to hardware concurrency.
inline unsigned thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("THINFILM_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(std::min<long>(v, 1024));
    }
    return hw;
}

// Runs fn(i) for i in [0, n) over at most thread_cap() threads. Each index is
// handled by exactly one call, so results written per index are deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned T = std::min<std::size_t>(thread_cap(), n);
    if (T <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(T);
    for (unsigned t = 0; t < T; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += T) fn(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace thinfilm
