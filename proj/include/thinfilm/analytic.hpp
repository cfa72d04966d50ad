#pragma once
// Closed forms: the thickness multiplier g_h, Benjamin-Ono profiles, the
// Peierls-Nabarro family and the boundary vortex, with hand-written first
// derivatives. Everything is templated on the floating type so tests can
// cross-check double results against long double evaluations.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "thinfilm/core.hpp"

namespace thinfilm {

// (1 - exp(-2 pi h k)) / (2 pi h k), continuous value 1 at k = 0
template <class T = double>
T gh(T h, T k) {
    if (!(h > 0)) throw Error("g_h requires h > 0");
    if (k < 0) throw Error("g_h requires k >= 0");
    T x = 2 * std::numbers::pi_v<T> * h * k;
    if (x == 0) return T(1);
    if (x < T(1e-5)) return T(1) - x / 2 + x * x / 6 - x * x * x / 24;
    return -std::expm1(-x) / x;
}

// 1 - g_h, kept accurate for small 2 pi h k
template <class T = double>
T one_minus_gh(T h, T k) {
    if (!(h > 0)) throw Error("g_h requires h > 0");
    T x = 2 * std::numbers::pi_v<T> * h * k;
    if (x < T(1e-3)) return x / 2 - x * x / 6 + x * x * x / 24 - x * x * x * x / 120;
    return T(1) + std::expm1(-x) / x;
}

// ---------------------------------------------------------------------------
// Benjamin-Ono family: alpha_bo in [1, 2]; alpha_bo = 2 selects u_2.

template <class T = double>
struct BOParam {
    T alpha_bo{1};
    T sigma{0.5};
    T gamma_bo{1};

    BOParam() = default;
    explicit BOParam(T a) : alpha_bo(a) {
        if (!(a >= 1 && a <= 2)) throw Error("alpha_bo must lie in [1, 2]");
        sigma = std::sqrt(a * (2 - a)) / 2;
        gamma_bo = (a < 2) ? a / (2 * sigma) : std::numeric_limits<T>::infinity();
    }
    bool is_u2() const { return alpha_bo == 2; }
    T period() const { return std::numbers::pi_v<T> / sigma; }

    T Gamma(T x2) const {
        if (x2 == 0) return gamma_bo;
        T t = std::tanh(sigma * x2);
        return (gamma_bo + t) / (1 + gamma_bo * t);
    }
    T dGamma(T x2) const {
        T t = std::tanh(sigma * x2);
        T den = 1 + gamma_bo * t;
        return sigma * (1 - t * t) * (1 - gamma_bo * gamma_bo) / (den * den);
    }
};

enum class BOKind { zero, alpha };  // alpha covers u_1 (alpha=1) and u_2 (alpha=2)

template <class T = double>
struct BOValue {
    T u, du1, du2;
};

template <class T = double>
BOValue<T> bo_eval_full(const BOParam<T>& p, T x1, T x2) {
    if (x2 < 0) throw Error("BO profiles are evaluated on x2 >= 0");
    if (p.is_u2()) {
        T s = 1 + x2, D = x1 * x1 + s * s;
        return {2 * s / D, -4 * s * x1 / (D * D), 2 * (x1 * x1 - s * s) / (D * D)};
    }
    T G = p.Gamma(x2), dG = p.dGamma(x2);
    T c = std::cos(p.sigma * x1), s = std::sin(p.sigma * x1);
    T D = c * c + G * G * s * s;
    T u = 2 * p.sigma * G / D;
    T dD1 = p.sigma * (G * G - 1) * std::sin(2 * p.sigma * x1);
    T dD2 = 2 * G * dG * s * s;
    return {u, -u * dD1 / D, 2 * p.sigma * dG / D - u * dD2 / D};
}

template <class T = double>
T bo_eval(const BOParam<T>& p, T x1, T x2) {
    return bo_eval_full(p, x1, x2).u;
}

template <class T = double>
T bo_eval(BOKind kind, T alpha_bo, T x1, T x2) {
    if (x2 < 0) throw Error("BO profiles are evaluated on x2 >= 0");
    if (kind == BOKind::zero) return T(0);
    return bo_eval(BOParam<T>(alpha_bo), x1, x2);
}

// ---------------------------------------------------------------------------
// Peierls-Nabarro family

enum class PNKind { constant, periodic, nonperiodic };

inline const char* to_string(PNKind k) {
    switch (k) {
        case PNKind::constant: return "constant";
        case PNKind::periodic: return "periodic";
        case PNKind::nonperiodic: return "nonperiodic";
    }
    return "?";
}

template <class T = double>
struct PNSolution {
    PNKind kind = PNKind::constant;
    int n = 0;
    int sign = 1;      // +1 or -1
    T alpha_bo = 1.5;  // periodic only, in (1, 2)
    T shift = 0;       // s (periodic) or a (nonperiodic)
    T lambda = 0;

    static PNSolution constant(int n, T lambda) { return {PNKind::constant, n, 1, T(1.5), T(0), lambda}; }
    static PNSolution nonperiodic(int n, int sign, T a, T lambda) {
        check_sign(sign);
        return {PNKind::nonperiodic, n, sign, T(1.5), a, lambda};
    }
    static PNSolution periodic(int n, int sign, T alpha_bo, T s, T lambda) {
        check_sign(sign);
        if (!(alpha_bo > 1 && alpha_bo < 2)) throw Error("periodic solutions need alpha_bo in (1, 2)");
        return {PNKind::periodic, n, sign, alpha_bo, s, lambda};
    }
    T period() const { return BOParam<T>(alpha_bo).period(); }

  private:
    static void check_sign(int s) {
        if (s != 1 && s != -1) throw Error("sign must be +1 or -1");
    }
};

template <class T = double>
struct PNValue {
    T f, d1, d2;
};

namespace detail {

// reduce t to (-pi/2, pi/2]
template <class T>
T principal_half_period(T t) {
    const T P = std::numbers::pi_v<T>;
    T r = t - P * std::round(t / P);
    if (r <= -P / 2) r += P;
    if (r > P / 2) r -= P;
    return r;
}

}  // namespace detail

// The periodic bracket arctan(tan t / G) - arctan(G tan t) equals
// arctan(c sin 2t) with c = (1/G - G)/2 because the product of the two
// arctan arguments is tan^2 t >= 0. That form is smooth across the lines
// where tan t is undefined and takes the value 0 there.
template <class T = double>
PNValue<T> pn_eval_full(const PNSolution<T>& s, T x1, T x2) {
    if (x2 < 0) throw Error("PN solutions are evaluated on x2 >= 0");
    const T base = 2 * std::numbers::pi_v<T> * s.n;
    switch (s.kind) {
        case PNKind::constant:
            return {std::numbers::pi_v<T> * s.n + s.lambda * x2, T(0), s.lambda};
        case PNKind::nonperiodic: {
            T X = x1 - s.shift, Y = 1 + x2, D = X * X + Y * Y;
            return {base + s.sign * 2 * std::atan(X / Y) + s.lambda * x2, s.sign * 2 * Y / D,
                    -s.sign * 2 * X / D + s.lambda};
        }
        case PNKind::periodic: {
            BOParam<T> p(s.alpha_bo);
            T t = detail::principal_half_period(p.sigma * (x1 - s.shift));
            T G = p.Gamma(x2), dG = p.dGamma(x2);
            T c = (1 / G - G) / 2;
            T dc = -dG * (1 / (G * G) + 1) / 2;
            T s2 = std::sin(2 * t), c2 = std::cos(2 * t);
            T den = 1 + c * c * s2 * s2;
            return {base + s.sign * 2 * std::atan(c * s2) + s.lambda * x2,
                    s.sign * 2 * c * 2 * p.sigma * c2 / den, s.sign * 2 * dc * s2 / den + s.lambda};
        }
    }
    return {T(0), T(0), T(0)};
}

template <class T = double>
T pn_eval(const PNSolution<T>& s, T x1, T x2) {
    return pn_eval_full(s, x1, x2).f;
}

// d2 f - lambda + sin f at (x1, 0)
template <class T = double>
T pn_boundary_residual(const PNSolution<T>& s, T x1) {
    auto v = pn_eval_full(s, x1, T(0));
    return v.d2 - s.lambda + std::sin(v.f);
}

// closed form of int_0^x1 (v(2 x0 - s, x2) - v(s, x2)) ds for v = u_alpha
template <class T = double>
T explicit_integral_closed_form(const BOParam<T>& p, T x1, T x2) {
    T t = detail::principal_half_period(p.sigma * x1);
    T G = p.Gamma(x2);
    return 2 * std::atan((1 / G - G) / 2 * std::sin(2 * t));
}

// ---------------------------------------------------------------------------
// Boundary vortex

template <class T = double>
struct VortexProfile {
    T epsilon{0.5};
    T a{0};
    T delta2{0};
};

template <class T = double>
PNValue<T> vortex_full(const VortexProfile<T>& v, T x1, T x2) {
    if (x2 < 0) throw Error("the vortex profile is evaluated on x2 >= 0");
    if (!(v.epsilon > 0)) throw Error("vortex epsilon must be positive");
    T X = x1 + v.epsilon * v.a, Y = x2 + v.epsilon, D = X * X + Y * Y;
    return {std::numbers::pi_v<T> / 2 - std::atan(X / Y) + v.delta2 * x2, -Y / D, X / D + v.delta2};
}

template <class T = double>
T vortex_phi(const VortexProfile<T>& v, T x1, T x2) {
    return vortex_full(v, x1, x2).f;
}

// d2 phi - sin(2 phi)/(2 eps) - delta2 at (x1, 0)
template <class T = double>
T vortex_boundary_residual(const VortexProfile<T>& v, T x1) {
    auto r = vortex_full(v, x1, T(0));
    return r.d2 - std::sin(2 * r.f) / (2 * v.epsilon) - v.delta2;
}

// 2 phi_eps(eps x) + pi
template <class T = double>
T rescaled_vortex(const VortexProfile<T>& v, T x1, T x2) {
    return 2 * vortex_phi(v, v.epsilon * x1, v.epsilon * x2) + std::numbers::pi_v<T>;
}

template <class T = double>
T vortex_rescaling_gap(const VortexProfile<T>& v, const PNSolution<T>& s, T X = 20, T Y = 20, int n1 = 81,
                       int n2 = 41) {
    T gap = 0;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            T x1 = -X + 2 * X * i / (n1 - 1), x2 = Y * j / (n2 - 1);
            gap = std::max(gap, std::abs(rescaled_vortex(v, x1, x2) - pn_eval(s, x1, x2)));
        }
    return gap;
}

// The rescaled vortex is the nonperiodic solution n = 1, sign -, shift -a,
// lambda = 2 eps delta2. The identity is checked on a sample box.
template <class T = double>
PNSolution<T> pn_from_vortex(const VortexProfile<T>& v) {
    auto s = PNSolution<T>::nonperiodic(1, -1, -v.a, 2 * v.epsilon * v.delta2);
    T gap = vortex_rescaling_gap(v, s, T(10), T(10), 21, 11);
    if (!(gap <= T(1e-10))) throw Error("rescaled vortex does not match the PN family");
    return s;
}

struct LayerReport {
    bool pass = true;
    std::vector<std::string> failures;
    double max_d1 = -std::numeric_limits<double>::infinity();  // largest d1 phi on the samples
    double tail_plus = 0;   // |phi(+100 eps, 0) - 0|
    double tail_minus = 0;  // |phi(-100 eps, 0) - pi|
};

// Boundary monotonicity and the 0 / pi limits of a layer function.
inline LayerReport layer_check(const VortexProfile<double>& v, const std::vector<double>& x1s) {
    LayerReport r;
    auto fail = [&](std::string msg) {
        r.pass = false;
        r.failures.push_back(std::move(msg));
    };
    double X = 100 * v.epsilon;
    if (x1s.empty()) fail("no samples");
    else {
        auto [lo, hi] = std::minmax_element(x1s.begin(), x1s.end());
        if (*lo > -X || *hi < X) fail("samples do not cover [-100 eps, 100 eps]");
    }
    for (double x : x1s) {
        double d1 = vortex_full(v, x, 0.0).d1;
        r.max_d1 = std::max(r.max_d1, d1);
        if (!(d1 < 0)) fail("d1 phi not negative at x1 = " + std::to_string(x));
    }
    r.tail_plus = std::abs(vortex_phi(v, X, 0.0));
    r.tail_minus = std::abs(vortex_phi(v, -X, 0.0) - pi);
    if (r.tail_plus > 0.05) fail("tail at +100 eps not within 0.05 of 0");
    if (r.tail_minus > 0.05) fail("tail at -100 eps not within 0.05 of pi");
    return r;
}

}  // namespace thinfilm
