#pragma once
// Reference computations that share no code with the library: quadrature in
// place of closed forms, finite differences in place of analytic derivatives.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

constexpr double pi = std::numbers::pi;

inline double gk(const std::function<double(double)>& f, double a, double b, double tol = 1e-12, unsigned depth = 12) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, depth, tol);
}

// g_h(k) = int_0^1 exp(-2 pi h k t) dt
inline double gh(double h, double k) {
    return gk([&](double t) { return std::exp(-2 * pi * h * k * t); }, 0.0, 1.0);
}

// 5-point Laplacian
template <class F>
double laplacian(F f, double x, double y, double s) {
    return (f(x + s, y) + f(x - s, y) + f(x, y + s) + f(x, y - s) - 4 * f(x, y)) / (s * s);
}

// one-sided fourth-order d/dy at y = 0
template <class F>
double dy_at_zero(F f, double x, double s = 1e-3) {
    return (-25 * f(x, 0.0) + 48 * f(x, s) - 36 * f(x, 2 * s) + 16 * f(x, 3 * s) - 3 * f(x, 4 * s)) / (12 * s);
}

// double thickness integral of 1/sqrt(rho^2 + (s-t)^2) in its textbook form
inline double kernel(double h, double rho) {
    return 2 * (h * std::asinh(h / rho) - std::sqrt(rho * rho + h * h) + rho);
}

// int int cos(t) cos(t') K_h(|x(t) - x(t')|) over the unit circle, reduced to
// one angle, 2 pi int_0^pi cos(psi) K_h(2 sin(psi/2)) dpsi, in log(psi).
inline double charge_integral_e1(double h) {
    auto f = [h](double v) {
        double psi = std::exp(v);
        return psi * std::cos(psi) * kernel(h, 2 * std::sin(psi / 2));
    };
    double top = std::log(pi), sum = 0;
    for (double v = top - 40; v < top - 1e-12; v += 2) sum += gk(f, v, std::min(v + 2, top), 1e-12);
    return 2 * pi * sum;
}

}  // namespace oracle
