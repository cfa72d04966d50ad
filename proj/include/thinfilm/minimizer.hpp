#pragma once
// Explicit gradient flows with backtracking for the half-plane energy on
// truncated half disks (Dirichlet data on the arc) and for the limit energy
// on the disk (free boundary), plus the discrete Euler-Lagrange residuals.

#include <optional>

#include "thinfilm/analytic.hpp"
#include "thinfilm/energy.hpp"

namespace thinfilm {

struct FlowConfig {
    double tau = 0.0;                 // 0 picks delta^2 / 5
    long max_iters = 100000;
    double grad_tol = 1e-3;           // sup norm of the mass-scaled gradient
    bool clamp = false;               // keep phi - delta2 x2 within [0, pi]
    std::function<double(double, double)> dirichlet;  // arc data; empty keeps the initial values
    int backtrack_limit = 40;         // halvings of tau before giving up
    bool momentum = true;             // heavy-ball extrapolation, dropped whenever it would raise the energy

    double step(double delta) const {
        double t = tau > 0 ? tau : 0.2 * delta * delta;
        if (t > 0.25 * delta * delta * (1 + 1e-12))
            throw Error("explicit step exceeds the stability bound delta^2/4");
        return t;
    }
};

struct FlowResult {
    AngleField phi;
    std::vector<double> energy_trace;  // discrete energy after each accepted step, starting with the initial value
    bool converged = false;
    long iterations = 0;
    long backtracks = 0;
    long restarts = 0;                 // momentum steps rejected for raising the energy
    long clamp_increases = 0;          // clamp steps that raised the energy (expected 0)
    double grad_sup = 0;
    double final_tau = 0;
    std::string status() const { return converged ? "converged" : "not converged"; }
};

struct ELResidual {
    double interior = 0;
    double boundary = 0;
};

// Interior: sup of the 5-point Laplacian over nodes strictly inside B_R with a
// full stencil and x2 > 0. Boundary: sup over flat nodes with |x1| < R of
// |d2 phi - sin(2 phi)/(2 eps) - delta2| with a one-sided second-order d2.
inline ELResidual el_residual(const AngleField& phi, const RegimeParams& rp) {
    rp.validate();
    const Grid2D& g = *phi.grid;
    if (g.kind != DomainKind::half_disk) throw Error("EL residual is defined on half-disk grids");
    if (phi.values.size() != g.size()) throw Error("field size does not match grid");
    const double D = g.delta, R = g.radius, eps = rp.epsilon();
    const auto& f = phi.values;
    ELResidual r;
    for (std::size_t a = 0; a < g.size(); ++a) {
        Vec2 x = g.pos(a);
        if (std::hypot(x[0], x[1]) >= R - 1e-12 * R) continue;
        const auto& nb = g.nbr[a];
        if (g.jy(a) >= 1) {
            if (std::any_of(nb.begin(), nb.end(), [](long v) { return v < 0; })) continue;
            double lap = (f[nb[0]] + f[nb[1]] + f[nb[2]] + f[nb[3]] - 4.0 * f[a]) / (D * D);
            r.interior = std::max(r.interior, std::abs(lap));
        } else {
            long p = nb[Grid2D::py];
            if (p < 0) continue;
            long pp = g.nbr[p][Grid2D::py];
            if (pp < 0) continue;
            double d2 = (-3.0 * f[a] + 4.0 * f[p] - f[pp]) / (2.0 * D);
            r.boundary = std::max(r.boundary, std::abs(d2 - std::sin(2.0 * f[a]) / (2.0 * eps) - rp.delta2));
        }
    }
    return r;
}

namespace detail {

// Quadratic-plus-linear edge energy sum_e c_e [k (u_b - u_a)^2 - l_e (u_b - u_a)]
// with per-node terms added by the caller.
struct EdgeSystem {
    std::vector<std::uint32_t> ea, eb;
    std::vector<double> c, lin;
    std::vector<std::uint8_t> free_node;
    std::vector<double> mass;
    double quad = 0.5;  // k

    double edge_energy(const std::vector<double>& u) const {
        double s = 0.0;
        for (std::size_t e = 0; e < ea.size(); ++e) {
            double d = u[eb[e]] - u[ea[e]];
            s += c[e] * quad * d * d - lin[e] * d;
        }
        return s;
    }
    void add_edge_gradient(const std::vector<double>& u, std::vector<double>& grad) const {
        for (std::size_t e = 0; e < ea.size(); ++e) {
            double d = u[eb[e]] - u[ea[e]];
            double t = 2.0 * quad * c[e] * d - lin[e];  // dE/d(u_b)
            grad[eb[e]] += t;
            grad[ea[e]] -= t;
        }
    }
};

// Backtracking descent. energy(u) and grad(u, g) give the discrete energy and
// its derivative; post(u) is an optional projection. With momentum the step
// is u - tau G + beta (u - u_prev), beta = k/(k+3) over the current streak of
// accepted extrapolations; a rejected extrapolation resets the streak and
// falls back to the plain step, so the energy never increases.
template <class EnergyFn, class GradFn, class PostFn>
FlowResult descend(AngleField start, const EdgeSystem& sys, const FlowConfig& cfg, double tau0, EnergyFn energy,
                   GradFn grad, PostFn post) {
    FlowResult res;
    std::vector<double>& u = start.values;
    const std::size_t n = u.size();
    double E = energy(u);
    res.energy_trace.push_back(E);
    double tau = tau0;
    std::vector<double> G(n), trial(n), prev = u;
    long streak = 0;
    while (true) {
        std::fill(G.begin(), G.end(), 0.0);
        grad(u, G);
        double gs = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            if (!sys.free_node[a]) {
                G[a] = 0.0;
                continue;
            }
            G[a] /= sys.mass[a];
            gs = std::max(gs, std::abs(G[a]));
        }
        res.grad_sup = gs;
        if (gs < cfg.grad_tol) {
            res.converged = true;
            break;
        }
        if (res.iterations >= cfg.max_iters) break;
        bool accepted = false;
        if (cfg.momentum && res.iterations > 0) {
            // extrapolated step; kept only if it lowers the energy, otherwise restart
            double beta = static_cast<double>(streak) / (streak + 3.0);
            for (std::size_t a = 0; a < n; ++a) trial[a] = u[a] - tau * G[a] + beta * (u[a] - prev[a]);
            post(trial, res);
            double Et = energy(trial);
            if (Et <= E) {
                prev = u;
                u.swap(trial);
                E = Et;
                accepted = true;
                ++streak;
            } else {
                streak = 0;
                ++res.restarts;
            }
        }
        for (int bt = 0; !accepted && bt <= cfg.backtrack_limit; ++bt) {
            for (std::size_t a = 0; a < n; ++a) trial[a] = u[a] - tau * G[a];
            post(trial, res);
            double Et = energy(trial);
            if (Et <= E) {
                prev = u;
                u.swap(trial);
                E = Et;
                accepted = true;
                break;
            }
            tau *= 0.5;
            ++res.backtracks;
        }
        if (!accepted) break;  // no descent possible at this resolution
        ++res.iterations;
        res.energy_trace.push_back(E);
    }
    res.final_tau = tau;
    res.phi = std::move(start);
    return res;
}

struct HalfDiskSystem {
    EdgeSystem sys;
    std::vector<std::uint32_t> flat_nodes;  // free nodes on x2 = 0
    double flat_coef = 0;                   // delta / (2 eps)
};

inline HalfDiskSystem half_disk_system(const Grid2D& g, const RegimeParams& rp) {
    HalfDiskSystem H;
    const double D = g.delta, R = g.radius;
    const std::size_t n = g.size();
    auto& s = H.sys;
    s.free_node.assign(n, 0);
    s.mass.assign(n, D * D);
    for (std::size_t a = 0; a < n; ++a) {
        Vec2 x = g.pos(a);
        if (std::hypot(x[0], x[1]) < R - 1e-12 * R) s.free_node[a] = 1;
        if (g.jy(a) == 0) {
            s.mass[a] = 0.5 * D * D;
            if (s.free_node[a]) H.flat_nodes.push_back(static_cast<std::uint32_t>(a));
        }
    }
    for (std::size_t a = 0; a < n; ++a)
        for (int d : {Grid2D::px, Grid2D::py}) {
            long b = g.nbr[a][d];
            if (b < 0 || (!s.free_node[a] && !s.free_node[b])) continue;
            double c = (d == Grid2D::px && g.jy(a) == 0) ? 0.5 : 1.0;
            double dl = d == Grid2D::px ? rp.delta1 : rp.delta2;
            s.ea.push_back(static_cast<std::uint32_t>(a));
            s.eb.push_back(static_cast<std::uint32_t>(b));
            s.c.push_back(c);
            s.lin.push_back(c * D * dl);
        }
    H.flat_coef = D / (2.0 * rp.epsilon());
    return H;
}

}  // namespace detail

// Discrete half-plane energy used by flow_Eeps:
// 1/2 sum_e c_e (phi_b - phi_a)^2 - sum_e c_e delta delta_e (phi_b - phi_a) + delta/(2 eps) sum_flat sin^2 phi,
// over edges with at least one free endpoint.
inline double discrete_Eeps(const AngleField& phi, const RegimeParams& rp) {
    rp.validate();
    auto H = detail::half_disk_system(*phi.grid, rp);
    double E = H.sys.edge_energy(phi.values);
    for (auto a : H.flat_nodes) E += H.flat_coef * std::sin(phi.values[a]) * std::sin(phi.values[a]);
    return E;
}

inline FlowResult flow_Eeps(const AngleField& initial, const RegimeParams& rp, const FlowConfig& cfg = {}) {
    rp.validate();
    const Grid2D& g = *initial.grid;
    if (g.kind != DomainKind::half_disk) throw Error("flow_Eeps runs on half-disk grids");
    if (cfg.clamp && rp.delta1 != 0) throw Error("the band clamp assumes delta1 = 0");
    const double tau0 = cfg.step(g.delta);
    auto H = detail::half_disk_system(g, rp);
    AngleField start = initial;
    if (cfg.dirichlet)
        for (std::size_t a = 0; a < g.size(); ++a)
            if (!H.sys.free_node[a]) {
                Vec2 x = g.pos(a);
                start.values[a] = cfg.dirichlet(x[0], x[1]);
            }
    std::vector<double> x2(g.size());
    for (std::size_t a = 0; a < g.size(); ++a) x2[a] = g.pos(a)[1];
    auto energy = [&](const std::vector<double>& u) {
        double E = H.sys.edge_energy(u);
        for (auto a : H.flat_nodes) E += H.flat_coef * std::sin(u[a]) * std::sin(u[a]);
        return E;
    };
    auto grad = [&](const std::vector<double>& u, std::vector<double>& G) {
        H.sys.add_edge_gradient(u, G);
        for (auto a : H.flat_nodes) G[a] += H.flat_coef * std::sin(2.0 * u[a]);
    };
    auto post = [&](std::vector<double>& u, FlowResult& res) {
        if (!cfg.clamp) return;
        double before = energy(u);
        for (std::size_t a = 0; a < u.size(); ++a) {
            if (!H.sys.free_node[a]) continue;
            double band = u[a] - rp.delta2 * x2[a];
            u[a] = std::clamp(band, 0.0, pi) + rp.delta2 * x2[a];
        }
        if (energy(u) > before * (1 + 1e-14) + 1e-300) ++res.clamp_increases;
    };
    FlowResult res = detail::descend(std::move(start), H.sys, cfg, tau0, energy, grad, post);
    // trace: flat points follow their nodes, arc points hold the Dirichlet data
    std::size_t b = 0;
    for (const auto& seg : g.segments)
        for (std::size_t k = 0; k < seg.points.size(); ++k, ++b) {
            if (seg.node[k] >= 0) res.phi.trace[b] = res.phi.values[static_cast<std::size_t>(seg.node[k])];
            else if (cfg.dirichlet) res.phi.trace[b] = cfg.dirichlet(seg.points[k][0], seg.points[k][1]);
        }
    return res;
}

// ---------------------------------------------------------------------------
// Limit energy on the disk in the angle variable

struct DiskFlowResult {
    FlowResult flow;
    EnergyBreakdown breakdown;  // energy_E0 of the final angle field
};

namespace detail {

struct BilinearStencil {
    std::array<long, 4> node{-1, -1, -1, -1};
    std::array<double, 4> w{};
};

inline BilinearStencil bilinear_stencil(const Grid2D& g, const Vec2& p) {
    double u = (p[0] - g.ox) / g.delta, v = (p[1] - g.oy) / g.delta;
    int i = static_cast<int>(std::floor(u)), j = static_cast<int>(std::floor(v));
    double fu = u - i, fv = v - j;
    BilinearStencil s;
    s.node = {g.node_at(i, j), g.node_at(i + 1, j), g.node_at(i, j + 1), g.node_at(i + 1, j + 1)};
    s.w = {(1 - fu) * (1 - fv), fu * (1 - fv), (1 - fu) * fv, fu * fv};
    for (int q = 0; q < 4; ++q)
        if (s.node[q] < 0 && s.w[q] > 0) throw Error("boundary point outside the active node set");
    return s;
}

}  // namespace detail

// alpha int |grad theta|^2 - 2 alpha int delta.grad theta - 2 gamma int H0.m
// + (1/2pi) int_circle cos^2(theta - theta_nu), with theta interpolated at the
// circle points. Edge weights are the mean of the two nodal areas over delta^2.
inline DiskFlowResult flow_E0_disk(const AngleField& initial, const RegimeParams& rp, const FlowConfig& cfg = {},
                                   Vec3 H0 = {0, 0, 0}) {
    rp.validate();
    const Grid2D& g = *initial.grid;
    if (g.kind != DomainKind::disk) throw Error("flow_E0_disk runs on disk grids");
    const double D = g.delta;
    const double tau0 = cfg.step(D);
    const std::size_t n = g.size();
    detail::EdgeSystem s;
    s.quad = rp.alpha;
    s.free_node.assign(n, 1);
    s.mass.assign(n, 2.0 * rp.alpha * D * D);
    for (std::size_t a = 0; a < n; ++a)
        for (int d : {Grid2D::px, Grid2D::py}) {
            long b = g.nbr[a][d];
            if (b < 0) continue;
            double c = 0.5 * (g.weight[a] + g.weight[b]) / (D * D);
            if (c <= 0) continue;
            double dl = d == Grid2D::px ? rp.delta1 : rp.delta2;
            s.ea.push_back(static_cast<std::uint32_t>(a));
            s.eb.push_back(static_cast<std::uint32_t>(b));
            s.c.push_back(c);
            s.lin.push_back(2.0 * rp.alpha * c * D * dl);
        }
    const auto& circ = g.segments.front();
    std::vector<detail::BilinearStencil> st;
    std::vector<double> tnu;
    for (std::size_t k = 0; k < circ.points.size(); ++k) {
        st.push_back(detail::bilinear_stencil(g, circ.points[k]));
        tnu.push_back(std::atan2(circ.normals[k][1], circ.normals[k][0]));
    }
    auto interp = [&](const std::vector<double>& u, std::size_t k) {
        double t = 0;
        for (int q = 0; q < 4; ++q)
            if (st[k].node[q] >= 0) t += st[k].w[q] * u[static_cast<std::size_t>(st[k].node[q])];
        return t;
    };
    const double zee = 2.0 * rp.gamma_zeeman;
    auto energy = [&](const std::vector<double>& u) {
        double E = s.edge_energy(u);
        for (std::size_t k = 0; k < st.size(); ++k) {
            double c = std::cos(interp(u, k) - tnu[k]);
            E += circ.weights[k] * c * c / (2.0 * pi);
        }
        if (zee != 0)
            for (std::size_t a = 0; a < n; ++a) E -= zee * g.weight[a] * (H0[0] * std::cos(u[a]) + H0[1] * std::sin(u[a]));
        return E;
    };
    auto grad = [&](const std::vector<double>& u, std::vector<double>& G) {
        s.add_edge_gradient(u, G);
        for (std::size_t k = 0; k < st.size(); ++k) {
            double dv = -circ.weights[k] * std::sin(2.0 * (interp(u, k) - tnu[k])) / (2.0 * pi);
            for (int q = 0; q < 4; ++q)
                if (st[k].node[q] >= 0) G[static_cast<std::size_t>(st[k].node[q])] += st[k].w[q] * dv;
        }
        if (zee != 0)
            for (std::size_t a = 0; a < n; ++a)
                G[a] -= zee * g.weight[a] * (-H0[0] * std::sin(u[a]) + H0[1] * std::cos(u[a]));
    };
    DiskFlowResult out;
    out.flow = detail::descend(initial, s, cfg, tau0, energy, grad, [](std::vector<double>&, FlowResult&) {});
    for (std::size_t k = 0; k < st.size(); ++k) out.flow.phi.trace[k] = interp(out.flow.phi.values, k);
    E0Options opt;
    opt.H0 = constant_field(H0);
    out.breakdown = energy_E0(out.flow.phi, rp, opt);
    return out;
}

// ---------------------------------------------------------------------------
// Compact perturbations

struct Bump {
    Vec2 center{};
    double radius = 1.0;
    double amplitude = 0.0;

    double operator()(double x1, double x2) const {
        double r2 = ((x1 - center[0]) * (x1 - center[0]) + (x2 - center[1]) * (x2 - center[1])) / (radius * radius);
        return r2 < 1.0 ? amplitude * (1.0 - r2) * (1.0 - r2) : 0.0;
    }
};

// count bumps with |A| <= max_amp, radius in [eps, 2 eps], centers in the upper
// half of B_{R/2} so the support stays well inside B_R.
inline std::vector<Bump> random_bumps(std::uint64_t seed, int count, double R, double eps, double max_amp = 0.3) {
    if (!(max_amp >= 0)) throw Error("bump amplitude bound must be non-negative");
    Rng rng(seed);
    std::vector<Bump> out;
    for (int i = 0; i < count; ++i) {
        Bump b;
        b.radius = rng.uniform(eps, 2 * eps);
        double rc = rng.uniform(0.0, std::max(0.0, 0.5 * R - b.radius));
        double th = rng.uniform(0.0, pi);
        b.center = {rc * std::cos(th), rc * std::sin(th)};
        b.amplitude = rng.uniform(-max_amp, max_amp);
        out.push_back(b);
    }
    return out;
}

// vortex profile on a half-disk grid, optionally perturbed
inline AngleField vortex_field(const GridPtr& g, const VortexProfile<double>& v, const Bump* bump = nullptr) {
    auto f = [&](double x1, double x2) {
        double base = vortex_phi(v, x1, x2);
        return bump ? base + (*bump)(x1, x2) : base;
    };
    auto s = sample_scalar(g, f);
    return AngleField{s.grid, std::move(s.values), std::move(s.trace)};
}

}  // namespace thinfilm
