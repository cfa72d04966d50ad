#pragma once
// Uniform grids over the unit disk, truncated half-disks and rectangles;
// sampled fields, finite differences, boundary quadrature and S^1 lifting.
//
// Nodes sit at (ox + i*delta, oy + j*delta). A node is active when its cell
// [x -+ delta/2] x [y -+ delta/2] meets the domain, or when it lies within a
// 1.5*delta ghost band outside a curved boundary. Ghost nodes carry zero
// quadrature weight but give cut cells full centered stencils.

#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <span>
#include <sstream>

#include "thinfilm/core.hpp"

namespace thinfilm {

enum class DomainKind { disk, half_disk, rectangle };
enum class NodeMask : std::uint8_t { outside = 0, interior = 1, boundary = 2 };

inline const char* to_string(DomainKind k) {
    switch (k) {
        case DomainKind::disk: return "disk";
        case DomainKind::half_disk: return "half_disk";
        case DomainKind::rectangle: return "rectangle";
    }
    return "?";
}

struct BoundarySegment {
    std::string name;
    std::vector<Vec2> points;
    std::vector<Vec2> normals;   // outward, unit
    std::vector<double> arclen;  // arc-length coordinate of each point
    std::vector<double> weights; // trapezoid weights in arc length
    std::vector<long> node;      // coincident active node, or -1
    bool closed = false;
    bool charged = false;        // carries the (m.nu)^2 boundary energy
    double length = 0.0;
};

namespace detail {

// area of [a,b]x[c,d] intersected with the disk |x| <= R centered at 0
inline double rect_disk_area(double a, double b, double c, double d, double R) {
    a = std::max(a, -R);
    b = std::min(b, R);
    if (b <= a || d <= c) return 0.0;
    auto S = [R](double X) {
        X = std::clamp(X, -R, R);
        return 0.5 * (X * std::sqrt(std::max(0.0, R * R - X * X)) + R * R * std::asin(X / R));
    };
    std::vector<double> br{a, b};
    for (double y : {c, d})
        if (std::abs(y) < R) {
            double s = std::sqrt(R * R - y * y);
            for (double X : {-s, s})
                if (X > a && X < b) br.push_back(X);
        }
    std::sort(br.begin(), br.end());
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        double u = br[k], v = br[k + 1];
        if (v <= u) continue;
        double xm = 0.5 * (u + v);
        double w = std::sqrt(std::max(0.0, R * R - xm * xm));
        double hi = std::min(d, w), lo = std::max(c, -w);
        if (hi <= lo) continue;
        double ihi = (d < w) ? d * (v - u) : S(v) - S(u);
        double ilo = (c > -w) ? c * (v - u) : -(S(v) - S(u));
        area += ihi - ilo;
    }
    return std::max(0.0, area);
}

}  // namespace detail

struct Grid2D {
    DomainKind kind = DomainKind::disk;
    double delta = 0.0;
    double radius = 0.0;                   // disk and half disk
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;  // rectangle bounds
    double ox = 0, oy = 0;
    int nx = 0, ny = 0;

    std::vector<long> active_of;      // lattice index -> active index or -1
    std::vector<long> lattice_of;     // active index -> lattice index
    std::vector<NodeMask> mask;       // per active node
    std::vector<double> weight;       // quadrature area per active node
    std::vector<std::array<long, 4>> nbr;  // +x, -x, +y, -y (active index or -1)
    std::vector<BoundarySegment> segments;
    std::vector<std::size_t> segment_offset;  // into concatenated boundary points

    enum Dir { px = 0, mx = 1, py = 2, my = 3 };

    std::size_t size() const { return lattice_of.size(); }
    std::size_t boundary_size() const {
        return segment_offset.empty() ? 0 : segment_offset.back();
    }
    int ix(std::size_t a) const { return static_cast<int>(lattice_of[a] % nx); }
    int jy(std::size_t a) const { return static_cast<int>(lattice_of[a] / nx); }
    Vec2 pos(std::size_t a) const { return {ox + ix(a) * delta, oy + jy(a) * delta}; }
    long node_at(int i, int j) const {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
        return active_of[static_cast<std::size_t>(j) * nx + i];
    }
    double area() const {
        double s = 0.0;
        for (double w : weight) s += w;
        return s;
    }
    // inside the closed physical domain (ghosts excluded)
    bool contains(const Vec2& p, double tol = 1e-12) const {
        switch (kind) {
            case DomainKind::disk: return std::hypot(p[0], p[1]) <= radius + tol;
            case DomainKind::half_disk:
                return p[1] >= -tol && std::hypot(p[0], p[1]) <= radius + tol;
            case DomainKind::rectangle:
                return p[0] >= xmin - tol && p[0] <= xmax + tol && p[1] >= ymin - tol &&
                       p[1] <= ymax + tol;
        }
        return false;
    }
    std::size_t count(NodeMask m) const {
        return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), m));
    }

    static Grid2D disk(double delta, double R = 1.0) {
        check_delta(delta);
        if (!(R > 0)) throw Error("disk radius must be positive");
        Grid2D g;
        g.kind = DomainKind::disk;
        g.delta = delta;
        g.radius = R;
        int M = static_cast<int>(std::ceil(R / delta)) + 2;
        g.ox = g.oy = -M * delta;
        g.nx = g.ny = 2 * M + 1;
        g.xmin = g.ymin = -R;
        g.xmax = g.ymax = R;
        g.build([&](double x, double y) {
            double h = 0.5 * delta;
            return detail::rect_disk_area(x - h, x + h, y - h, y + h, R);
        }, [&](double x, double y) { return std::hypot(x, y) <= R + 1.5 * delta; });
        // exact polar parametrization of the circle
        BoundarySegment s;
        s.name = "circle";
        s.closed = true;
        s.charged = true;
        std::size_t N = std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(2 * pi * R / delta)));
        N += N % 2;  // even count keeps the sampling symmetric under both reflections
        double w = 2 * pi * R / static_cast<double>(N);
        for (std::size_t k = 0; k < N; ++k) {
            double th = 2 * pi * static_cast<double>(k) / static_cast<double>(N);
            s.points.push_back({R * std::cos(th), R * std::sin(th)});
            s.normals.push_back({std::cos(th), std::sin(th)});
            s.arclen.push_back(R * th);
            s.weights.push_back(w);
            s.node.push_back(-1);
        }
        s.length = 2 * pi * R;
        g.segments.push_back(std::move(s));
        g.finish_segments();
        return g;
    }

    // B_R^+ = {|x| < R, x2 > 0}; flat side on x2 = 0 with normal -e2.
    static Grid2D half_disk(double R, double delta) {
        check_delta(delta);
        if (!(R > 0)) throw Error("half-disk radius must be positive");
        double q = R / delta;
        if (std::abs(q - std::round(q)) > 1e-9 * std::max(1.0, q))
            throw Error("half-disk radius must be an integer multiple of the spacing");
        Grid2D g;
        g.kind = DomainKind::half_disk;
        g.delta = delta;
        g.radius = R;
        int K = static_cast<int>(std::round(q));
        int M = K + 2;
        g.ox = -M * delta;
        g.oy = 0.0;
        g.nx = 2 * M + 1;
        g.ny = M + 1;
        g.xmin = -R;
        g.xmax = R;
        g.ymin = 0;
        g.ymax = R;
        g.build([&](double x, double y) {
            double h = 0.5 * delta;
            return detail::rect_disk_area(x - h, x + h, std::max(0.0, y - h), y + h, R);
        }, [&](double x, double y) { return y >= 0 && std::hypot(x, y) <= R + 1.5 * delta; });
        BoundarySegment flat;
        flat.name = "flat";
        flat.charged = true;
        for (int i = -K; i <= K; ++i) {
            double x = i * delta;
            flat.points.push_back({x, 0.0});
            flat.normals.push_back({0.0, -1.0});
            flat.arclen.push_back(x + R);
            flat.weights.push_back((i == -K || i == K) ? 0.5 * delta : delta);
            flat.node.push_back(g.node_at(i + M, 0));
        }
        flat.length = 2 * R;
        g.segments.push_back(std::move(flat));
        BoundarySegment arc;
        arc.name = "arc";
        std::size_t N = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(pi * R / delta)));
        double w = pi * R / static_cast<double>(N);
        for (std::size_t k = 0; k <= N; ++k) {
            double th = pi * static_cast<double>(k) / static_cast<double>(N);
            arc.points.push_back({R * std::cos(th), R * std::sin(th)});
            arc.normals.push_back({std::cos(th), std::sin(th)});
            arc.arclen.push_back(R * th);
            arc.weights.push_back((k == 0 || k == N) ? 0.5 * w : w);
            arc.node.push_back(-1);
        }
        arc.length = pi * R;
        g.segments.push_back(std::move(arc));
        g.finish_segments();
        return g;
    }

    // [x0,x1] x [y0,y1]; only the bottom edge (normal -e2) is charged.
    static Grid2D rectangle(double x0, double x1, double y0, double y1, double delta) {
        check_delta(delta);
        double qx = (x1 - x0) / delta, qy = (y1 - y0) / delta;
        if (!(qx > 0 && qy > 0)) throw Error("rectangle must have positive extent");
        if (std::abs(qx - std::round(qx)) > 1e-9 * qx || std::abs(qy - std::round(qy)) > 1e-9 * qy)
            throw Error("rectangle sides must be integer multiples of the spacing");
        Grid2D g;
        g.kind = DomainKind::rectangle;
        g.delta = delta;
        g.xmin = x0;
        g.xmax = x1;
        g.ymin = y0;
        g.ymax = y1;
        g.ox = x0;
        g.oy = y0;
        int Nx = static_cast<int>(std::round(qx)), Ny = static_cast<int>(std::round(qy));
        g.nx = Nx + 1;
        g.ny = Ny + 1;
        g.build([&](double x, double y) {
            double h = 0.5 * delta;
            double wx = std::min(x + h, x1) - std::max(x - h, x0);
            double wy = std::min(y + h, y1) - std::max(y - h, y0);
            return std::max(0.0, wx) * std::max(0.0, wy);
        }, [](double, double) { return false; });
        auto edge = [&](const char* name, int i0, int j0, int di, int dj, int n, Vec2 nu, bool charged) {
            BoundarySegment s;
            s.name = name;
            s.charged = charged;
            for (int k = 0; k <= n; ++k) {
                int i = i0 + k * di, j = j0 + k * dj;
                s.points.push_back({g.ox + i * delta, g.oy + j * delta});
                s.normals.push_back(nu);
                s.arclen.push_back(k * delta);
                s.weights.push_back((k == 0 || k == n) ? 0.5 * delta : delta);
                s.node.push_back(g.node_at(i, j));
            }
            s.length = n * delta;
            g.segments.push_back(std::move(s));
        };
        edge("bottom", 0, 0, 1, 0, Nx, {0, -1}, true);
        edge("right", Nx, 0, 0, 1, Ny, {1, 0}, false);
        edge("top", Nx, Ny, -1, 0, Nx, {0, 1}, false);
        edge("left", 0, Ny, 0, -1, Ny, {-1, 0}, false);
        g.finish_segments();
        return g;
    }

    // Index of the boundary node where angle unwrapping is anchored:
    // maximal x1, ties broken by smallest x2.
    std::size_t anchor_node() const {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (std::size_t a = 0; a < size(); ++a) {
            if (mask[a] != NodeMask::boundary) continue;
            if (best == std::numeric_limits<std::size_t>::max() || ix(a) > ix(best) ||
                (ix(a) == ix(best) && jy(a) < jy(best)))
                best = a;
        }
        if (best == std::numeric_limits<std::size_t>::max()) throw Error("grid has no boundary nodes");
        return best;
    }

    // nearest active node to p (lattice rounding, then a small search)
    std::size_t nearest_node(const Vec2& p) const {
        int ci = static_cast<int>(std::lround((p[0] - ox) / delta));
        int cj = static_cast<int>(std::lround((p[1] - oy) / delta));
        long best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int r = 0; r <= 3 && best < 0; ++r)
            for (int j = cj - r; j <= cj + r; ++j)
                for (int i = ci - r; i <= ci + r; ++i) {
                    long a = node_at(i, j);
                    if (a < 0) continue;
                    Vec2 q = pos(static_cast<std::size_t>(a));
                    double d = std::hypot(q[0] - p[0], q[1] - p[1]);
                    if (d < bd) {
                        bd = d;
                        best = a;
                    }
                }
        if (best < 0) throw Error("no active node near boundary point");
        return static_cast<std::size_t>(best);
    }

  private:
    static void check_delta(double delta) {
        if (!(delta > 0) || !std::isfinite(delta)) throw Error("grid spacing must be positive");
    }

    template <class AreaFn, class GhostFn>
    void build(AreaFn cell_area, GhostFn ghost) {
        active_of.assign(static_cast<std::size_t>(nx) * ny, -1);
        std::vector<double> w;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                double x = ox + i * delta, y = oy + j * delta;
                double A = cell_area(x, y);
                if (A < 1e-15 * delta * delta) A = 0.0;
                if (A > 0.0 || ghost(x, y)) {
                    std::size_t L = static_cast<std::size_t>(j) * nx + i;
                    active_of[L] = static_cast<long>(lattice_of.size());
                    lattice_of.push_back(L);
                    w.push_back(A);
                }
            }
        weight = std::move(w);
        nbr.resize(size());
        mask.resize(size());
        for (std::size_t a = 0; a < size(); ++a) {
            int i = ix(a), j = jy(a);
            nbr[a] = {node_at(i + 1, j), node_at(i - 1, j), node_at(i, j + 1), node_at(i, j - 1)};
            bool full = std::all_of(nbr[a].begin(), nbr[a].end(), [](long v) { return v >= 0; });
            mask[a] = full ? NodeMask::interior : NodeMask::boundary;
        }
    }

    void finish_segments() {
        segment_offset.assign(1, 0);
        for (const auto& s : segments) segment_offset.push_back(segment_offset.back() + s.points.size());
    }
};

using GridPtr = std::shared_ptr<const Grid2D>;

inline GridPtr make_grid(Grid2D g) { return std::make_shared<const Grid2D>(std::move(g)); }

// ---------------------------------------------------------------------------
// Fields

struct ScalarField {
    GridPtr grid;
    std::vector<double> values;  // per active node
    std::vector<double> trace;   // per boundary point (all segments)
};
using AngleField = ScalarField;

struct VectorField3 {
    GridPtr grid;
    int layers = 1;              // x3 midpoints (k + 1/2)/layers in (0,1)
    std::vector<Vec3> values;    // layer-major: values[k * n + a]
    std::vector<Vec3> trace;     // layer-major over boundary points
    bool unit_sphere = false;

    std::size_t n() const { return grid->size(); }
    std::size_t nb() const { return grid->boundary_size(); }
    Vec3& at(int k, std::size_t a) { return values[static_cast<std::size_t>(k) * n() + a]; }
    const Vec3& at(int k, std::size_t a) const { return values[static_cast<std::size_t>(k) * n() + a]; }
    const Vec3& trace_at(int k, std::size_t b) const { return trace[static_cast<std::size_t>(k) * nb() + b]; }
    double x3(int k) const { return (k + 0.5) / layers; }

    // max | |m| - 1 | over nodes and trace
    double unit_defect() const {
        double e = 0.0;
        for (const auto& v : values) e = std::max(e, std::abs(std::sqrt(norm2(v)) - 1.0));
        for (const auto& v : trace) e = std::max(e, std::abs(std::sqrt(norm2(v)) - 1.0));
        return e;
    }
    void require_unit(double tol = 1e-12) const {
        double e = unit_defect();
        if (e > tol) throw Error("field is not unit-valued (defect " + std::to_string(e) + ")");
    }
    bool x3_invariant(double tol = 1e-14) const {
        for (int k = 1; k < layers; ++k)
            for (std::size_t a = 0; a < n(); ++a)
                for (int c = 0; c < 3; ++c)
                    if (std::abs(at(k, a)[c] - at(0, a)[c]) > tol) return false;
        return true;
    }
};

inline ScalarField sample_scalar(const GridPtr& g, const std::function<double(double, double)>& f) {
    ScalarField s{g, std::vector<double>(g->size()), std::vector<double>(g->boundary_size())};
    for (std::size_t a = 0; a < g->size(); ++a) {
        Vec2 p = g->pos(a);
        s.values[a] = f(p[0], p[1]);
    }
    std::size_t b = 0;
    for (const auto& seg : g->segments)
        for (const auto& p : seg.points) s.trace[b++] = f(p[0], p[1]);
    return s;
}

inline VectorField3 sample_vector(const GridPtr& g, int layers,
                                  const std::function<Vec3(double, double, double)>& f,
                                  bool unit_sphere = false) {
    if (layers < 1) throw Error("layer count must be at least 1");
    VectorField3 m;
    m.grid = g;
    m.layers = layers;
    m.values.resize(static_cast<std::size_t>(layers) * g->size());
    m.trace.resize(static_cast<std::size_t>(layers) * g->boundary_size());
    for (int k = 0; k < layers; ++k) {
        double z = m.x3(k);
        for (std::size_t a = 0; a < g->size(); ++a) {
            Vec2 p = g->pos(a);
            m.at(k, a) = f(p[0], p[1], z);
        }
        std::size_t b = 0;
        for (const auto& seg : g->segments)
            for (const auto& p : seg.points) m.trace[static_cast<std::size_t>(k) * m.nb() + b++] = f(p[0], p[1], z);
    }
    m.unit_sphere = unit_sphere;
    if (unit_sphere) m.require_unit();
    return m;
}

// in-plane field (cos phi, sin phi, 0) of an angle field
inline VectorField3 exp_i(const AngleField& phi) {
    VectorField3 m;
    m.grid = phi.grid;
    m.layers = 1;
    m.values.resize(phi.values.size());
    m.trace.resize(phi.trace.size());
    for (std::size_t a = 0; a < phi.values.size(); ++a)
        m.values[a] = {std::cos(phi.values[a]), std::sin(phi.values[a]), 0.0};
    for (std::size_t b = 0; b < phi.trace.size(); ++b)
        m.trace[b] = {std::cos(phi.trace[b]), std::sin(phi.trace[b]), 0.0};
    m.unit_sphere = true;
    return m;
}

// Bilinear interpolation of node values at p. The four lattice corners must
// be active, which the ghost band guarantees for points on the boundary.
inline double interpolate(const Grid2D& g, std::span<const double> v, const Vec2& p) {
    double u = (p[0] - g.ox) / g.delta, w = (p[1] - g.oy) / g.delta;
    int i = static_cast<int>(std::floor(u)), j = static_cast<int>(std::floor(w));
    i = std::clamp(i, 0, g.nx - 2);
    j = std::clamp(j, 0, g.ny - 2);
    double fu = u - i, fw = w - j;
    long c00 = g.node_at(i, j), c10 = g.node_at(i + 1, j), c01 = g.node_at(i, j + 1), c11 = g.node_at(i + 1, j + 1);
    if (c00 < 0 || c10 < 0 || c01 < 0 || c11 < 0) throw Error("interpolation stencil leaves the active nodes");
    return (1 - fu) * (1 - fw) * v[c00] + fu * (1 - fw) * v[c10] + (1 - fu) * fw * v[c01] + fu * fw * v[c11];
}

// ---------------------------------------------------------------------------
// Finite differences

struct Gradient2 {
    std::vector<Vec2> grad;
    std::vector<std::uint8_t> valid;
    std::size_t masked_out = 0;  // active nodes without a usable stencil
};

namespace detail {

// derivative along one axis from values at 0, +1, +2, -1, -2 (NaN if absent)
template <class Get>
inline bool axis_derivative(const Grid2D& g, std::size_t a, int dir_plus, Get val, double& out) {
    int dir_minus = dir_plus + 1;
    long p = g.nbr[a][dir_plus], m = g.nbr[a][dir_minus];
    double h2 = 2.0 * g.delta;
    if (p >= 0 && m >= 0) {
        out = (val(p) - val(m)) / h2;
        return true;
    }
    if (p >= 0) {
        long pp = g.nbr[p][dir_plus];
        if (pp >= 0) {
            out = (-3.0 * val(a) + 4.0 * val(p) - val(pp)) / h2;
            return true;
        }
    }
    if (m >= 0) {
        long mm = g.nbr[m][dir_minus];
        if (mm >= 0) {
            out = (3.0 * val(a) - 4.0 * val(m) + val(mm)) / h2;
            return true;
        }
    }
    return false;
}

}  // namespace detail

// Second-order gradient: centered where possible, one-sided otherwise.
inline Gradient2 fd_gradient(const Grid2D& g, std::span<const double> f) {
    if (f.size() != g.size()) throw Error("field size does not match grid");
    Gradient2 r;
    r.grad.assign(g.size(), {0.0, 0.0});
    r.valid.assign(g.size(), 0);
    auto val = [&](long b) { return f[static_cast<std::size_t>(b)]; };
    for (std::size_t a = 0; a < g.size(); ++a) {
        double dx = 0, dy = 0;
        bool ok = detail::axis_derivative(g, a, Grid2D::px, val, dx) &&
                  detail::axis_derivative(g, a, Grid2D::py, val, dy);
        if (ok) {
            r.grad[a] = {dx, dy};
            r.valid[a] = 1;
        } else {
            ++r.masked_out;
        }
    }
    return r;
}

// Gradient of the phase of a planar unit field, built from wrapped phase
// differences so it agrees with fd_gradient of any consistent lifting.
inline Gradient2 fd_gradient_phase(const Grid2D& g, std::span<const double> m1, std::span<const double> m2) {
    if (m1.size() != g.size() || m2.size() != g.size()) throw Error("field size does not match grid");
    std::vector<double> arg(g.size());
    for (std::size_t a = 0; a < g.size(); ++a) arg[a] = std::atan2(m2[a], m1[a]);
    Gradient2 r;
    r.grad.assign(g.size(), {0.0, 0.0});
    r.valid.assign(g.size(), 0);
    for (std::size_t a = 0; a < g.size(); ++a) {
        // local unwrap relative to node a along each axis
        auto local = [&](long b) -> double {
            std::size_t ub = static_cast<std::size_t>(b);
            if (ub == a) return 0.0;
            // b is one or two steps away along one axis; walk from a
            for (int d = 0; d < 4; ++d) {
                long n1 = g.nbr[a][d];
                if (n1 < 0) continue;
                double l1 = wrap_angle(arg[n1] - arg[a]);
                if (n1 == b) return l1;
                long n2 = g.nbr[n1][d];
                if (n2 == b) return l1 + wrap_angle(arg[n2] - arg[n1]);
            }
            return std::numeric_limits<double>::quiet_NaN();
        };
        double dx = 0, dy = 0;
        bool ok = detail::axis_derivative(g, a, Grid2D::px, local, dx) &&
                  detail::axis_derivative(g, a, Grid2D::py, local, dy);
        if (ok) {
            r.grad[a] = {dx, dy};
            r.valid[a] = 1;
        } else {
            ++r.masked_out;
        }
    }
    return r;
}

// d/dx3 across layers at x3 midpoints; second order when layers >= 3.
inline std::vector<Vec3> fd_x3(const VectorField3& m) {
    if (m.layers < 2) throw Error("x3 derivative needs at least two layers");
    std::size_t n = m.n();
    int L = m.layers;
    double dz = 1.0 / L;
    std::vector<Vec3> d(static_cast<std::size_t>(L) * n);
    for (int k = 0; k < L; ++k)
        for (std::size_t a = 0; a < n; ++a) {
            Vec3 r{};
            for (int c = 0; c < 3; ++c) {
                if (L == 2) {
                    r[c] = (m.at(1, a)[c] - m.at(0, a)[c]) / dz;
                } else if (k == 0) {
                    r[c] = (-3 * m.at(0, a)[c] + 4 * m.at(1, a)[c] - m.at(2, a)[c]) / (2 * dz);
                } else if (k == L - 1) {
                    r[c] = (3 * m.at(L - 1, a)[c] - 4 * m.at(L - 2, a)[c] + m.at(L - 3, a)[c]) / (2 * dz);
                } else {
                    r[c] = (m.at(k + 1, a)[c] - m.at(k - 1, a)[c]) / (2 * dz);
                }
            }
            d[static_cast<std::size_t>(k) * n + a] = r;
        }
    return d;
}

// ---------------------------------------------------------------------------
// Boundary quadrature

inline void require_ordered(const BoundarySegment& s) {
    for (std::size_t k = 0; k + 1 < s.points.size(); ++k) {
        double ds = s.arclen[k + 1] - s.arclen[k];
        double chord = std::hypot(s.points[k + 1][0] - s.points[k][0], s.points[k + 1][1] - s.points[k][1]);
        if (!(ds > 0) || chord > ds * (1 + 1e-9) + 1e-14)
            throw Error("boundary segment '" + s.name + "' is not ordered along the curve");
    }
}

// trapezoid rule in arc length over one segment
inline double boundary_quadrature(const BoundarySegment& s, std::span<const double> g) {
    if (g.size() != s.points.size()) throw Error("boundary sample count mismatch");
    require_ordered(s);
    double sum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) sum += s.weights[k] * g[k];
    return sum;
}

// sum over the charged segments of a grid; g spans all boundary points
inline double charged_boundary_quadrature(const Grid2D& grid, std::span<const double> g) {
    if (g.size() != grid.boundary_size()) throw Error("boundary sample count mismatch");
    double sum = 0.0;
    for (std::size_t s = 0; s < grid.segments.size(); ++s) {
        if (!grid.segments[s].charged) continue;
        std::size_t o = grid.segment_offset[s];
        sum += boundary_quadrature(grid.segments[s], g.subspan(o, grid.segments[s].points.size()));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// S^1 lifting

inline AngleField lift_angle(const VectorField3& m) {
    if (m.layers != 1) throw Error("lifting expects a single-layer planar field");
    for (const auto* vec : {&m.values, &m.trace})
        for (const auto& v : *vec)
            if (std::abs(v[0] * v[0] + v[1] * v[1] - 1.0) > 1e-10 || std::abs(v[2]) > 1e-10)
                throw Error("lifting expects an S^1-valued field");
    const Grid2D& g = *m.grid;
    std::size_t n = g.size();
    std::vector<double> arg(n);
    for (std::size_t a = 0; a < n; ++a) arg[a] = std::atan2(m.values[a][1], m.values[a][0]);
    for (std::size_t a = 0; a < n; ++a)
        for (int d : {Grid2D::px, Grid2D::py}) {
            long b = g.nbr[a][d];
            if (b >= 0 && std::abs(wrap_angle(arg[b] - arg[a])) >= pi - 0.1) {
                std::ostringstream os;
                os << "field too rough to lift at spacing " << g.delta;
                throw Error(os.str());
            }
        }
    AngleField phi{m.grid, std::vector<double>(n, 0.0), std::vector<double>(m.trace.size(), 0.0)};
    std::vector<std::uint8_t> seen(n, 0);
    std::size_t root = g.anchor_node();
    phi.values[root] = arg[root];
    seen[root] = 1;
    std::deque<std::size_t> queue{root};
    std::size_t reached = 1;
    while (!queue.empty()) {
        std::size_t a = queue.front();
        queue.pop_front();
        for (int d = 0; d < 4; ++d) {
            long b = g.nbr[a][d];
            if (b < 0 || seen[b]) continue;
            phi.values[b] = phi.values[a] + wrap_angle(arg[b] - arg[a]);
            seen[b] = 1;
            ++reached;
            queue.push_back(static_cast<std::size_t>(b));
        }
    }
    if (reached != n) throw Error("grid graph is not connected; cannot lift");
    std::size_t b = 0;
    for (const auto& seg : g.segments)
        for (std::size_t k = 0; k < seg.points.size(); ++k, ++b) {
            double tb = std::atan2(m.trace[b][1], m.trace[b][0]);
            std::size_t a = seg.node[k] >= 0 ? static_cast<std::size_t>(seg.node[k]) : g.nearest_node(seg.points[k]);
            phi.trace[b] = phi.values[a] + wrap_angle(tb - arg[a]);
        }
    return phi;
}

}  // namespace thinfilm
