#pragma once
// The three energy levels: the rescaled film energy on w x (0,1), its 2D limit
// on w, and the lifted half-plane energy; plus DMI density, per-term
// breakdowns, the DMI bounds and the coercivity margin.

#include <optional>

#include "thinfilm/fields.hpp"
#include "thinfilm/strayfield.hpp"

namespace thinfilm {

struct RegimeParams {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma_zeeman = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;

    double epsilon() const { return 2.0 * pi * alpha; }
    void validate() const {
        if (!(alpha > 0)) throw Error("alpha must be positive");
        if (!(beta >= 0)) throw Error("beta must be non-negative");
        for (double v : {gamma_zeeman, delta1, delta2})
            if (!std::isfinite(v)) throw Error("regime parameters must be finite");
    }
};

using Anisotropy = std::function<double(const Vec3&)>;
using HField = std::function<Vec3(double, double)>;

// easy-plane default: Phi(m) = m3^2
inline double default_anisotropy(const Vec3& m) { return m[2] * m[2]; }
inline HField constant_field(Vec3 H) {
    return [H](double, double) { return H; };
}

// Physical parameters realizing the regime at one thickness h.
struct PhysicalParams {
    double h = 0, log_scale = 0;  // log_scale = h |log h|
    double d2 = 0, Q = 0;
    Mat3 D{};                     // D[j] = row D_j
    double zeeman_scale = 0;      // H_ext,h = zeeman_scale * H0
};

struct ThicknessSchedule {
    RegimeParams rp;
    HField H0 = constant_field({0, 0, 0});
    double offdiag_exponent = 1.5;  // remaining D entries h^e |log h|, e > 1

    PhysicalParams at(double h) const {
        if (!(h > 0 && h < 1)) throw Error("thickness must satisfy 0 < h < 1");
        PhysicalParams p;
        p.h = h;
        p.log_scale = h * std::abs(std::log(h));
        p.d2 = rp.alpha * p.log_scale;
        p.Q = rp.beta * p.log_scale;
        double small = std::pow(h, offdiag_exponent) * std::abs(std::log(h));
        for (auto& row : p.D) row.fill(small);
        p.D[0][2] = 2.0 * rp.delta1 * p.d2;
        p.D[1][2] = 2.0 * rp.delta2 * p.d2;
        p.zeeman_scale = rp.gamma_zeeman * p.log_scale;
        return p;
    }

    static ThicknessSchedule standard(const RegimeParams& rp, Vec3 H0 = {0, 0, 0}, double exponent = 1.5) {
        rp.validate();
        if (!(exponent > 1)) throw Error("off-diagonal exponent must exceed 1");
        return {rp, constant_field(H0), exponent};
    }
};

struct EnergyBreakdown {
    double exchange = 0, dmi_inplane = 0, dmi_vertical = 0, stray = 0, anisotropy = 0, zeeman = 0, total = 0;

    double sum_parts() const { return exchange + dmi_inplane + dmi_vertical + stray + anisotropy + zeeman; }
    EnergyBreakdown& finalize() {
        total = sum_parts();
        return *this;
    }
    // the three groups used by the coercivity argument
    double group0() const { return exchange + stray + anisotropy; }
    double group1() const { return zeeman; }
    double group2() const { return dmi_inplane + dmi_vertical; }
};

// sum_j D_j . (d_j m x m)
inline double dmi_density(const Mat3& D, const Mat3& grad_m, const Vec3& m) {
    if (std::abs(norm2(m) - 1.0) > 2e-10) throw Error("DMI density expects a unit vector");
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += dot(D[j], cross(grad_m[j], m));
    return s;
}

// ---------------------------------------------------------------------------
// 2D limit energy on a grid. On the disk every boundary point is charged; on
// half disks and rectangles only the flat side is.

enum class GradientRule { components, phase };

struct E0Options {
    Anisotropy phi = default_anisotropy;
    HField H0 = constant_field({0, 0, 0});
    GradientRule rule = GradientRule::components;
};

namespace detail {

struct PlanarGrad {
    std::vector<Mat3> d;  // d[a][j] = d_j m at node a (j = 0, 1)
    std::vector<std::uint8_t> valid;
};

inline PlanarGrad planar_gradient(const Grid2D& g, const std::vector<Vec3>& v, std::size_t offset, GradientRule rule) {
    std::size_t n = g.size();
    PlanarGrad r;
    r.d.assign(n, Mat3{});
    r.valid.assign(n, 1);
    if (rule == GradientRule::components) {
        std::vector<double> comp(n);
        for (int c = 0; c < 3; ++c) {
            for (std::size_t a = 0; a < n; ++a) comp[a] = v[offset + a][c];
            auto G = fd_gradient(g, comp);
            for (std::size_t a = 0; a < n; ++a) {
                r.valid[a] &= G.valid[a];
                r.d[a][0][c] = G.grad[a][0];
                r.d[a][1][c] = G.grad[a][1];
            }
        }
    } else {
        std::vector<double> m1(n), m2(n);
        for (std::size_t a = 0; a < n; ++a) {
            if (std::abs(v[offset + a][2]) > 1e-10) throw Error("phase gradients need an S^1-valued field");
            m1[a] = v[offset + a][0];
            m2[a] = v[offset + a][1];
        }
        auto G = fd_gradient_phase(g, m1, m2);
        for (std::size_t a = 0; a < n; ++a) {
            r.valid[a] = G.valid[a];
            for (int j = 0; j < 2; ++j) r.d[a][j] = {-m2[a] * G.grad[a][j], m1[a] * G.grad[a][j], 0.0};
        }
    }
    return r;
}

inline EnergyBreakdown e0_sum(const Grid2D& g, const std::vector<Vec3>& m, const std::vector<Vec3>& trace,
                              const PlanarGrad& G, const RegimeParams& rp, const E0Options& opt) {
    EnergyBreakdown e;
    for (std::size_t a = 0; a < g.size(); ++a) {
        double w = g.weight[a];
        if (w <= 0 || !G.valid[a]) continue;
        const Vec3& v = m[a];
        const Mat3& d = G.d[a];
        double grad2 = norm2(d[0]) + norm2(d[1]);
        double dmi = rp.delta1 * wedge(d[0][0], d[0][1], v[0], v[1]) + rp.delta2 * wedge(d[1][0], d[1][1], v[0], v[1]);
        e.exchange += w * rp.alpha * grad2;
        e.dmi_inplane += w * 2.0 * rp.alpha * dmi;
        if (rp.beta != 0) e.anisotropy += w * rp.beta * opt.phi(v);
        if (rp.gamma_zeeman != 0) {
            Vec2 x = g.pos(a);
            e.zeeman -= w * 2.0 * rp.gamma_zeeman * dot(opt.H0(x[0], x[1]), v);
        }
    }
    std::vector<double> q(g.boundary_size());
    std::size_t b = 0;
    for (const auto& seg : g.segments)
        for (std::size_t k = 0; k < seg.points.size(); ++k, ++b) {
            double mn = trace[b][0] * seg.normals[k][0] + trace[b][1] * seg.normals[k][1];
            q[b] = mn * mn;
        }
    e.stray = charged_boundary_quadrature(g, q) / (2.0 * pi);
    return e.finalize();
}

}  // namespace detail

inline EnergyBreakdown energy_E0(const VectorField3& m, const RegimeParams& rp, const E0Options& opt = {}) {
    rp.validate();
    if (m.layers != 1) throw Error("the limit energy takes a single-layer field on the 2D domain");
    double defect = m.unit_defect();
    if (defect > 1e-10) throw Error("the limit energy requires a unit field");
    auto G = detail::planar_gradient(*m.grid, m.values, 0, opt.rule);
    return detail::e0_sum(*m.grid, m.values, m.trace, G, rp, opt);
}

// angle input: d_j m = m^perp d_j phi with finite differences of phi
inline EnergyBreakdown energy_E0(const AngleField& phi, const RegimeParams& rp, const E0Options& opt = {}) {
    rp.validate();
    const Grid2D& g = *phi.grid;
    auto m = exp_i(phi);
    auto Gp = fd_gradient(g, phi.values);
    detail::PlanarGrad G;
    G.valid = Gp.valid;
    G.d.assign(g.size(), Mat3{});
    for (std::size_t a = 0; a < g.size(); ++a)
        for (int j = 0; j < 2; ++j)
            G.d[a][j] = {-m.values[a][1] * Gp.grad[a][j], m.values[a][0] * Gp.grad[a][j], 0.0};
    return detail::e0_sum(g, m.values, m.trace, G, rp, opt);
}

// Half-plane energy 1/2 int (|grad phi|^2 - 2 delta.grad phi) + 1/(2 eps) int_flat sin^2 phi.
// Parts: exchange, dmi_inplane (the delta term), stray (the flat-boundary term).
inline EnergyBreakdown energy_Eeps_parts(const AngleField& phi, const RegimeParams& rp) {
    rp.validate();
    const Grid2D& g = *phi.grid;
    if (g.kind == DomainKind::disk) throw Error("the half-plane energy needs a grid with a flat side on x2 = 0");
    auto G = fd_gradient(g, phi.values);
    EnergyBreakdown e;
    for (std::size_t a = 0; a < g.size(); ++a) {
        double w = g.weight[a];
        if (w <= 0 || !G.valid[a]) continue;
        const Vec2& d = G.grad[a];
        e.exchange += 0.5 * w * norm2(d);
        e.dmi_inplane -= w * (rp.delta1 * d[0] + rp.delta2 * d[1]);
    }
    std::vector<double> s(phi.trace.size());
    for (std::size_t b = 0; b < s.size(); ++b) s[b] = std::sin(phi.trace[b]) * std::sin(phi.trace[b]);
    e.stray = charged_boundary_quadrature(g, s) / (2.0 * rp.epsilon());
    return e.finalize();
}

inline double energy_Eeps(const AngleField& phi, const RegimeParams& rp) { return energy_Eeps_parts(phi, rp).total; }

struct LiftingGap {
    double gap = 0;        // E0(m)/(2 alpha) - Eeps(lift m)
    double e0_scaled = 0;
    double eeps = 0;
};

// Anisotropy and Zeeman terms are not part of the half-plane functional and
// are left out of the E0 side.
inline LiftingGap lifting_consistency(const VectorField3& m, const RegimeParams& rp,
                                      GradientRule rule = GradientRule::phase) {
    E0Options opt;
    opt.rule = rule;
    RegimeParams r0 = rp;
    r0.beta = 0;
    r0.gamma_zeeman = 0;
    LiftingGap L;
    L.e0_scaled = energy_E0(m, r0, opt).total / (2.0 * rp.alpha);
    L.eeps = energy_Eeps(lift_angle(m), rp);
    L.gap = L.e0_scaled - L.eeps;
    return L;
}

// ---------------------------------------------------------------------------
// Film energy on w x (0,1)

enum class StrayMode { fourier, omit };

struct EhOptions {
    Anisotropy phi = default_anisotropy;
    StrayMode stray = StrayMode::fourier;
    std::optional<SpectralGrid> spectral;  // defaults to SpectralGrid::for_grid
};

namespace detail {

// per-layer in-plane gradients and the x3 derivative of a layered field
struct LayerGrad {
    std::vector<PlanarGrad> planar;
    std::vector<Vec3> d3;
};

inline LayerGrad layer_gradients(const VectorField3& m) {
    LayerGrad r;
    for (int k = 0; k < m.layers; ++k)
        r.planar.push_back(planar_gradient(*m.grid, m.values, static_cast<std::size_t>(k) * m.n(),
                                           GradientRule::components));
    r.d3 = fd_x3(m);
    return r;
}

}  // namespace detail

inline EnergyBreakdown energy_Eh(const VectorField3& m, const ThicknessSchedule& ts, double h,
                                 const EhOptions& opt = {}) {
    if (!(h > 0)) throw Error("thickness must be positive");
    if (h >= 1) throw Error("film energy is defined for h < 1");
    if (m.layers < 2) throw Error("film energy needs at least two x3 layers");
    if (m.unit_defect() > 1e-10) throw Error("film energy requires a unit field");
    const Grid2D& g = *m.grid;
    const PhysicalParams P = ts.at(h);
    const double Ls = P.log_scale;
    auto LG = detail::layer_gradients(m);
    EnergyBreakdown e;
    const double wz = 1.0 / m.layers;
    for (int k = 0; k < m.layers; ++k) {
        const auto& G = LG.planar[static_cast<std::size_t>(k)];
        for (std::size_t a = 0; a < g.size(); ++a) {
            double w = g.weight[a] * wz;
            if (w <= 0 || !G.valid[a]) continue;
            const Vec3& v = m.at(k, a);
            const Mat3& d = G.d[a];
            const Vec3& d3 = LG.d3[static_cast<std::size_t>(k) * g.size() + a];
            e.exchange += w * (P.d2 / Ls) * (norm2(d[0]) + norm2(d[1]) + norm2(d3) / (h * h));
            e.dmi_inplane += w / Ls * (dot(P.D[0], cross(d[0], v)) + dot(P.D[1], cross(d[1], v)));
            e.dmi_vertical += w / (h * Ls) * dot(P.D[2], cross(d3, v));
            if (P.Q != 0) e.anisotropy += w * (P.Q / Ls) * opt.phi(v);
            if (P.zeeman_scale != 0) {
                Vec2 x = g.pos(a);
                e.zeeman -= w * (2.0 / Ls) * P.zeeman_scale * dot(ts.H0(x[0], x[1]), v);
            }
        }
    }
    if (opt.stray == StrayMode::fourier) {
        if (!m.x3_invariant()) throw Error("the Fourier stray energy requires an x3-invariant field");
        SpectralGrid sg = opt.spectral ? *opt.spectral : SpectralGrid::for_grid(g);
        e.stray = fourier_stray_energy(m, h, sg) / (h * Ls);
    }
    return e.finalize();
}

// ---------------------------------------------------------------------------
// DMI bounds and coercivity

struct DmiBound {
    double lhs = 0, rhs = 0;
    bool holds(double rel = 1e-12) const { return lhs <= rhs * (1 + rel) + 1e-300; }
};

// rows 1, 2: |int D_j.d_j m x m| <= |D_j3| int |d_j m' ^ m'| + (|D_j1|+|D_j2|) int (1+|d_j m|^2)
// row 3:     |(1/h) int D_3.d_3 m x m| <= (|D_31|+|D_32|+|D_33|/2) int (1 + |d_3 m|^2/h^2)
inline std::array<DmiBound, 3> dmi_bounds(const VectorField3& m, const Mat3& D, double h) {
    if (m.layers < 2) throw Error("DMI bounds need at least two x3 layers");
    if (m.unit_defect() > 1e-10) throw Error("DMI bounds rely on |m| = 1");
    const Grid2D& g = *m.grid;
    auto LG = detail::layer_gradients(m);
    std::array<double, 3> lhs{}, wedge_int{}, one_plus{};
    const double wz = 1.0 / m.layers;
    for (int k = 0; k < m.layers; ++k) {
        const auto& G = LG.planar[static_cast<std::size_t>(k)];
        for (std::size_t a = 0; a < g.size(); ++a) {
            double w = g.weight[a] * wz;
            if (w <= 0 || !G.valid[a]) continue;
            const Vec3& v = m.at(k, a);
            for (int j = 0; j < 2; ++j) {
                const Vec3& dj = G.d[a][j];
                lhs[j] += w * dot(D[j], cross(dj, v));
                wedge_int[j] += w * std::abs(wedge(dj[0], dj[1], v[0], v[1]));
                one_plus[j] += w * (1.0 + norm2(dj));
            }
            const Vec3& d3 = LG.d3[static_cast<std::size_t>(k) * g.size() + a];
            lhs[2] += w / h * dot(D[2], cross(d3, v));
            one_plus[2] += w * (1.0 + norm2(d3) / (h * h));
        }
    }
    std::array<DmiBound, 3> r;
    for (int j = 0; j < 2; ++j)
        r[j] = {std::abs(lhs[j]), std::abs(D[j][2]) * wedge_int[j] + (std::abs(D[j][0]) + std::abs(D[j][1])) * one_plus[j]};
    r[2] = {std::abs(lhs[2]), (std::abs(D[2][0]) + std::abs(D[2][1]) + 0.5 * std::abs(D[2][2])) * one_plus[2]};
    return r;
}

struct CoercivityReport {
    EnergyBreakdown energy;
    double margin = 0;   // E_h - E_h^(0)/2
    double C = 0;
    double C_gamma = 0;
    double C_dmi = 0;    // C(alpha, delta1, delta2)
    double eps_hat = 0;
    double o_h = 0;      // small-entry DMI coefficients relative to d^2/(h|log h|)
    bool holds() const { return margin >= -C; }
};

// The constant follows the coercivity argument: eps_hat is the largest value
// with 1 - eps_hat - o_h >= 3/4, where o_h is evaluated at h_floor (>= h).
inline double coercivity_o_h(const ThicknessSchedule& ts, double h_floor) {
    PhysicalParams P = ts.at(h_floor);
    double o_in = 0;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) o_in += std::abs(P.D[j][k]);
    double o_v = std::abs(P.D[2][0]) + std::abs(P.D[2][1]) + 0.5 * std::abs(P.D[2][2]);
    return (o_in + o_v) / P.d2;
}

inline CoercivityReport coercivity_margin(const VectorField3& m, const ThicknessSchedule& ts, double h,
                                          const EhOptions& opt = {}, double h_floor = -1) {
    if (h_floor < 0) h_floor = h;
    if (h_floor < h) throw Error("h-floor must be at least h");
    CoercivityReport r;
    r.energy = energy_Eh(m, ts, h, opt);
    r.margin = r.energy.total - 0.5 * r.energy.group0();
    r.o_h = coercivity_o_h(ts, h_floor);
    r.eps_hat = 0.25 - r.o_h;
    if (!(r.eps_hat > 0)) throw Error("h-floor too large: small DMI entries exceed the absorbable fraction");
    const Grid2D& g = *m.grid;
    double vol = g.area();  // |Omega_1| = |w| * 1
    double h_l1 = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) {
        if (g.weight[a] <= 0) continue;
        Vec2 x = g.pos(a);
        h_l1 += g.weight[a] * std::sqrt(norm2(ts.H0(x[0], x[1])));
    }
    const auto& rp = ts.rp;
    r.C_gamma = 2.0 * std::abs(rp.gamma_zeeman) * h_l1;
    r.C_dmi = (rp.alpha + 1.0) * vol * (rp.delta1 * rp.delta1 + rp.delta2 * rp.delta2 + 1.0) + 1.0;
    r.C = r.C_gamma + r.C_dmi / r.eps_hat;
    return r;
}

}  // namespace thinfilm
