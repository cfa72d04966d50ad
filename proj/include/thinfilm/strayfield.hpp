#pragma once
// Stray-field energy of x3-invariant magnetizations on the unit disk through
// its Fourier representation, the lateral boundary-charge integral I(h) and
// the limiting boundary term.

#include <fftw3.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <complex>
#include <mutex>

#include "thinfilm/analytic.hpp"
#include "thinfilm/fields.hpp"

namespace thinfilm {

// Padded FFT box [-L/2, L/2)^2 with N^2 nodes; frequencies k/L.
// The lattice sum is tapered smoothly to zero between taper_lo and taper_hi
// (fractions of the Nyquist radius); the remainder is supplied by the
// high-frequency asymptotics of a jump across the boundary.
struct SpectralGrid {
    double L = 4.0;
    int N = 256;
    double taper_lo = 0.25;
    double taper_hi = 0.5;

    double spacing() const { return L / N; }
    double nyquist() const { return 0.5 * N / L; }

    void validate(double domain_diameter = 2.0) const {
        if (!(L >= 4.0)) throw Error("spectral box extent must be at least 4");
        if (L < 2.0 * domain_diameter - 1e-12) throw Error("spectral padding factor must be at least 2");
        if (N < 8 || (N & (N - 1)) != 0) throw Error("FFT size must be a power of two");
        if (!(taper_lo > 0 && taper_lo < taper_hi && taper_hi <= 1.0)) throw Error("invalid spectral taper");
    }

    // Box aligned with a disk grid: same spacing, nodes coincide. The frequency
    // lattice spacing 1/L limits accuracy near xi = 0, where the multiplier has
    // a kink; padding 4 keeps that error near 0.3%.
    static SpectralGrid for_grid(const Grid2D& g, double padding = 4.0) {
        if (g.kind != DomainKind::disk) throw Error("spectral grids are defined for the disk");
        if (padding < 2.0) throw Error("spectral padding factor must be at least 2");
        double need = padding * 2.0 * g.radius / g.delta;
        int N = 8;
        while (N < need - 1e-9) N *= 2;
        SpectralGrid sg;
        sg.N = N;
        sg.L = N * g.delta;
        sg.validate(2.0 * g.radius);
        return sg;
    }
};

struct StrayParts {
    double lateral_lattice = 0, lateral_tail = 0;  // in-plane charges
    double surface_lattice = 0, surface_tail = 0;  // m3 charges
    double total() const { return lateral_lattice + lateral_tail + surface_lattice + surface_tail; }
};

namespace detail {

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

inline void fft2_forward(std::vector<std::complex<double>>& a, int N) {
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan = fftw_plan_dft_2d(N, N, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
}

inline double taper(double k, double k1, double k2) {
    if (k <= k1) return 1.0;
    if (k >= k2) return 0.0;
    double c = std::cos(0.5 * pi * (k - k1) / (k2 - k1));
    return c * c;
}

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// int_0^inf (1 - taper(k)) w(k) / k^2 dk, on a log scale in k
template <class W>
double tail_integral(W w, double k1, double k2) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double u) {
        double k = std::exp(u);
        return (1.0 - taper(k, k1, k2)) * w(k) / k;
    };
    double a = std::log(k1), b = std::log(k2);
    double s = gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
    // past k2 the integrand is w(k)/k in u; w <= 1 so 45 e-folds suffice
    for (double u = b; u < b + 45.0; u += 5.0) s += gauss_kronrod<double, 61>::integrate(f, u, u + 5.0, 15, 1e-13);
    return s;
}

}  // namespace detail

// Surface-charge density integrals of the boundary trace on charged segments
inline double trace_normal_square(const VectorField3& m) {
    const Grid2D& g = *m.grid;
    std::vector<double> q(g.boundary_size());
    std::size_t b = 0;
    for (const auto& seg : g.segments)
        for (std::size_t k = 0; k < seg.points.size(); ++k, ++b) {
            const Vec3& v = m.trace_at(0, b);
            double mn = v[0] * seg.normals[k][0] + v[1] * seg.normals[k][1];
            q[b] = mn * mn;
        }
    return charged_boundary_quadrature(g, q);
}

// h int |xi.F(m' 1_w)|^2/|xi|^2 (1 - g_h) + h int |F(m3 1_w)|^2 g_h, for the
// first layer of m (the caller is responsible for x3-invariance).
inline double fourier_stray_energy(const VectorField3& m, double h, const SpectralGrid& sg,
                                   StrayParts* parts = nullptr) {
    if (!(h > 0)) throw Error("stray energy requires h > 0");
    const Grid2D& g = *m.grid;
    if (g.kind != DomainKind::disk) throw Error("Fourier stray energy is implemented on the disk");
    sg.validate(2.0 * g.radius);
    const double D = g.delta;
    if (std::abs(sg.spacing() - D) > 1e-12 * D) throw Error("spectral grid spacing must equal the field spacing");
    const int N = sg.N;
    const double L = sg.L;
    std::vector<std::complex<double>> F1(static_cast<std::size_t>(N) * N), F2(F1.size()), F3(F1.size());
    for (std::size_t a = 0; a < g.size(); ++a) {
        double w = g.weight[a];
        if (w <= 0) continue;
        Vec2 x = g.pos(a);
        long p = std::lround((x[0] + 0.5 * L) / D), q = std::lround((x[1] + 0.5 * L) / D);
        if (p < 0 || q < 0 || p >= N || q >= N) throw Error("spectral box does not contain the domain");
        std::size_t idx = static_cast<std::size_t>(q) * N + static_cast<std::size_t>(p);
        const Vec3& v = m.at(0, a);
        double c = w / (D * D);
        F1[idx] = v[0] * c;
        F2[idx] = v[1] * c;
        F3[idx] = v[2] * c;
    }
    detail::fft2_forward(F1, N);
    detail::fft2_forward(F2, N);
    detail::fft2_forward(F3, N);
    const double k1 = sg.taper_lo * sg.nyquist(), k2 = sg.taper_hi * sg.nyquist();
    const double D4 = D * D * D * D;
    double lat = 0.0, sur = 0.0;
    for (int r = 0; r < N; ++r) {
        int ky = r < N / 2 ? r : r - N;
        for (int c = 0; c < N; ++c) {
            int kx = c < N / 2 ? c : c - N;
            double xi1 = kx / L, xi2 = ky / L, k = std::hypot(xi1, xi2);
            double chi = detail::taper(k, k1, k2);
            if (chi == 0.0) continue;
            // cell-average weights act as a box filter; undo it
            double filt = detail::sinc(pi * D * xi1) * detail::sinc(pi * D * xi2);
            double corr = D4 / (filt * filt);
            std::size_t idx = static_cast<std::size_t>(r) * N + static_cast<std::size_t>(c);
            sur += chi * std::norm(F3[idx]) * corr * gh(h, k);
            if (k > 0) {
                double proj = std::norm(xi1 * F1[idx] + xi2 * F2[idx]) / (k * k);
                lat += chi * proj * corr * one_minus_gh(h, k);
            }
        }
    }
    const double dxi2 = 1.0 / (L * L);
    // jump asymptotics: angular integral of |F|^2 ~ (int_boundary jump^2) / (2 pi^2 k^3)
    std::vector<double> qn(g.boundary_size()), q3(g.boundary_size());
    std::size_t b = 0;
    for (const auto& seg : g.segments)
        for (std::size_t k = 0; k < seg.points.size(); ++k, ++b) {
            const Vec3& v = m.trace_at(0, b);
            double mn = v[0] * seg.normals[k][0] + v[1] * seg.normals[k][1];
            qn[b] = mn * mn;
            q3[b] = v[2] * v[2];
        }
    double Bn = charged_boundary_quadrature(g, qn), B3 = charged_boundary_quadrature(g, q3);
    double tl = 0.0, ts = 0.0;
    if (Bn > 0) tl = Bn / (2 * pi * pi) * detail::tail_integral([h](double k) { return one_minus_gh(h, k); }, k1, k2);
    if (B3 > 0) ts = B3 / (2 * pi * pi) * detail::tail_integral([h](double k) { return gh(h, k); }, k1, k2);
    StrayParts P{h * lat * dxi2, h * tl, h * sur * dxi2, h * ts};
    double E = P.total();
    if (!std::isfinite(E)) throw Error("stray-field FFT produced a non-finite value");
    if (parts) *parts = P;
    return E;
}

// ---------------------------------------------------------------------------
// Boundary charges

// int_0^h int_0^h ds dt / sqrt(rho^2 + (s-t)^2)
inline double thickness_kernel(double h, double rho) {
    if (!(h > 0)) throw Error("thickness kernel requires h > 0");
    if (!(rho > 0)) throw Error("thickness kernel requires rho > 0");
    return 2.0 * (h * std::asinh(h / rho) - h * h / (std::sqrt(rho * rho + h * h) + rho));
}

// int_0^rho K_h
inline double thickness_kernel_primitive(double h, double rho) {
    if (rho <= 0) return 0.0;
    double r = std::sqrt(rho * rho + h * h);
    return 2.0 * h * rho * std::asinh(h / rho) + h * h * std::asinh(rho / h) - rho * h * h / (r + rho);
}

// int_0^rho (rho - r) K_h(r) dr, so that the double integral of K_h(|u - v|)
// over two arc cells of width w at offset c is Q(c+w) - 2 Q(c) + Q(c-w).
inline double thickness_kernel_second_primitive(double h, double rho) {
    rho = std::abs(rho);
    if (rho == 0) return 0.0;
    double r = std::sqrt(rho * rho + h * h);
    // r^3 - rho^3 - h^3 without cancellation for rho >> h
    double cubes = h * h * (r * r + r * rho + rho * rho) / (r + rho) - h * h * h;
    return h * rho * rho * std::asinh(h / rho) + h * h * rho * std::asinh(rho / h) - cubes / 3.0;
}

enum class DiagonalRule { analytic, floor };

struct ChargeResult {
    double value = 0;
    double diagonal_error_estimate = 0;  // |analytic - floored| on the diagonal cells
};

// I(h) for a normal trace q = m.nu sampled uniformly on a circle of radius R
// (q[k] at angle 2 pi k / N), with q constant on each arc cell.
// analytic: exact cell-pair integrals of K_h in arc length, plus the smooth
// chord-versus-arc difference at the cell centres.
// floor: midpoint rule everywhere, the diagonal evaluated at half a cell.
inline ChargeResult boundary_charge_I(std::span<const double> q, double R, double h,
                                      DiagonalRule rule = DiagonalRule::analytic) {
    if (!(h > 0)) throw Error("boundary charge integral requires h > 0");
    const std::size_t N = q.size();
    if (N < 8) throw Error("too few boundary samples");
    const double w = 2 * pi * R / static_cast<double>(N);
    auto Q = [h](double x) { return thickness_kernel_second_primitive(h, x); };
    // kernel weight as a function of cyclic index distance
    std::vector<double> W(N / 2 + 1);
    for (std::size_t d = 0; d <= N / 2; ++d) {
        double c = static_cast<double>(d) * w;
        double chord = 2 * R * std::sin(pi * static_cast<double>(d) / static_cast<double>(N));
        if (rule == DiagonalRule::floor) {
            W[d] = w * w * thickness_kernel(h, d == 0 ? 0.5 * w : chord);
        } else if (d == 0) {
            W[d] = 2.0 * Q(w);
        } else {
            W[d] = Q(c + w) - 2.0 * Q(c) + Q(c - w) + w * w * (thickness_kernel(h, chord) - thickness_kernel(h, c));
        }
    }
    double diag_alt = rule == DiagonalRule::analytic ? w * w * thickness_kernel(h, 0.5 * w) : 2.0 * Q(w);
    ChargeResult r;
    double qq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            std::size_t d = i > j ? i - j : j - i;
            if (d > N / 2) d = N - d;
            row += W[d] * q[j];
        }
        r.value += q[i] * row;
        qq += q[i] * q[i];
    }
    r.diagonal_error_estimate = std::abs(W[0] - diag_alt) * qq;
    return r;
}

// I(h) from the circle trace of a field on a disk grid
inline ChargeResult boundary_charge_I(const VectorField3& m, double h, DiagonalRule rule = DiagonalRule::analytic) {
    const Grid2D& g = *m.grid;
    if (g.kind != DomainKind::disk) throw Error("boundary charge integral is implemented on the disk");
    const auto& seg = g.segments.at(0);
    std::vector<double> q(seg.points.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        const Vec3& v = m.trace_at(0, k);
        q[k] = v[0] * seg.normals[k][0] + v[1] * seg.normals[k][1];
    }
    return boundary_charge_I(q, g.radius, h, rule);
}

// (1/2 pi) int_{charged boundary} (m.nu)^2
inline double asymptotic_boundary_term(const VectorField3& m) { return trace_normal_square(m) / (2 * pi); }

}  // namespace thinfilm
