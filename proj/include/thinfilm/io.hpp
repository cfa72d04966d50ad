#pragma once
// Experiment configuration (strict JSON schema with path-qualified errors)
// and CSV emission/reading of sampled fields.

#include <cstdio>
#include <fstream>
#include <optional>

#include "json.hpp"
#include "thinfilm/energy.hpp"
#include "thinfilm/minimizer.hpp"

namespace thinfilm {

struct ConfigError : Error {
    std::string path;
    ConfigError(std::string p, const std::string& msg) : Error(p + ": " + msg), path(std::move(p)) {}
};

struct GridSpec {
    std::string domain = "disk";  // disk, half_disk, rectangle
    double delta = 1.0 / 64;
    double R = 1.0;
    std::array<double, 4> rect{-1.0, 1.0, 0.0, 1.0};  // x0, x1, y0, y1
    int fft_size = 0;     // 0: derived from padding
    double padding = 4.0;
    int layers = 2;

    GridPtr build() const {
        if (domain == "disk") return make_grid(Grid2D::disk(delta, R));
        if (domain == "half_disk") return make_grid(Grid2D::half_disk(R, delta));
        return make_grid(Grid2D::rectangle(rect[0], rect[1], rect[2], rect[3], delta));
    }
    SpectralGrid spectral(const Grid2D& g) const {
        SpectralGrid sg = SpectralGrid::for_grid(g, padding);
        if (fft_size > 0) {
            sg.N = fft_size;
            sg.L = fft_size * g.delta;
            sg.validate(2.0 * g.radius);
        }
        return sg;
    }
};

struct FieldSpec {
    std::string kind = "e1";  // e1, e2, random, random_planar, csv
    std::uint64_t seed = 7;
    std::string path;
};

struct VortexSpec {
    double epsilon = 0.5, a = 0.0, delta2 = 0.1;
    int bumps = 0;
    double bump_amplitude = 0.3;
};

struct PNSpec {
    std::string kind = "nonperiodic";
    int n = 0, sign = 1;
    double alpha_bo = 1.5, shift = 0.0, lambda = 0.0;
    double x1_min = -10, x1_max = 10;
    int x1_count = 201;
    std::vector<double> x2_values{0.0, 0.5, 1.0, 2.0};

    PNSolution<double> solution() const {
        if (kind == "constant") return PNSolution<double>::constant(n, lambda);
        if (kind == "periodic") return PNSolution<double>::periodic(n, sign, alpha_bo, shift, lambda);
        return PNSolution<double>::nonperiodic(n, sign, shift, lambda);
    }
};

struct ExperimentConfig {
    RegimeParams regime;
    double offdiag_exponent = 1.5;
    Vec3 H0{0, 0, 0};
    GridSpec grid;
    bool has_grid = false;  // minimize derives a vortex-scaled grid otherwise
    FlowConfig flow;
    std::vector<double> h_values;
    std::string out_dir = ".";
    std::uint64_t seed = 7;
    FieldSpec field;
    std::string problem = "vortex";  // minimize: vortex (half disk) or disk
    VortexSpec vortex;
    PNSpec pn;
    std::vector<std::string> checks;
    nlohmann::json check_params = nlohmann::json::object();

    ThicknessSchedule schedule() const {
        auto ts = ThicknessSchedule::standard(regime, H0, offdiag_exponent);
        return ts;
    }
};

namespace detail {

class JsonReader {
  public:
    JsonReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }
    void allow(std::initializer_list<const char*> keys) const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool ok = false;
            for (const char* k : keys) ok |= it.key() == k;
            if (!ok) throw ConfigError(path_ + "/" + it.key(), "unknown key");
        }
    }
    bool has(const char* k) const { return j_.contains(k); }
    std::string at(const char* k) const { return path_ + "/" + k; }
    const nlohmann::json& raw(const char* k) const { return j_.at(k); }

    void num(const char* k, double& out) const {
        if (!has(k)) return;
        if (!j_[k].is_number()) throw ConfigError(at(k), "expected a number");
        out = j_[k].get<double>();
    }
    void positive(const char* k, double& out) const {
        num(k, out);
        if (has(k) && !(out > 0)) throw ConfigError(at(k), "must be positive");
    }
    template <class I>
    void integer(const char* k, I& out, long long lo) const {
        if (!has(k)) return;
        if (!j_[k].is_number_integer()) throw ConfigError(at(k), "expected an integer");
        long long v = j_[k].get<long long>();
        if (v < lo) throw ConfigError(at(k), "must be at least " + std::to_string(lo));
        out = static_cast<I>(v);
    }
    void boolean(const char* k, bool& out) const {
        if (!has(k)) return;
        if (!j_[k].is_boolean()) throw ConfigError(at(k), "expected true or false");
        out = j_[k].get<bool>();
    }
    void str(const char* k, std::string& out, std::initializer_list<const char*> choices = {}) const {
        if (!has(k)) return;
        if (!j_[k].is_string()) throw ConfigError(at(k), "expected a string");
        out = j_[k].get<std::string>();
        if (choices.size() == 0) return;
        for (const char* c : choices)
            if (out == c) return;
        std::string msg = "must be one of";
        for (const char* c : choices) msg += std::string(" ") + c;
        throw ConfigError(at(k), msg);
    }
    void numbers(const char* k, std::vector<double>& out) const {
        if (!has(k)) return;
        if (!j_[k].is_array()) throw ConfigError(at(k), "expected an array of numbers");
        out.clear();
        for (std::size_t i = 0; i < j_[k].size(); ++i) {
            if (!j_[k][i].is_number()) throw ConfigError(at(k) + "/" + std::to_string(i), "expected a number");
            out.push_back(j_[k][i].get<double>());
        }
    }
    JsonReader sub(const char* k) const { return JsonReader(j_.at(k), at(k)); }

  private:
    const nlohmann::json& j_;
    std::string path_;
};

}  // namespace detail

// Validates everything before any computation; unknown keys are rejected.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig c;
    detail::JsonReader r(j, "");
    r.allow({"regime", "schedule", "grid", "flow", "sweep", "io", "field", "problem", "vortex", "pn", "checks",
             "check_params"});
    if (r.has("regime")) {
        auto s = r.sub("regime");
        s.allow({"alpha", "beta", "gamma_zeeman", "delta1", "delta2"});
        s.positive("alpha", c.regime.alpha);
        s.num("beta", c.regime.beta);
        if (c.regime.beta < 0) throw ConfigError(s.at("beta"), "must be non-negative");
        s.num("gamma_zeeman", c.regime.gamma_zeeman);
        s.num("delta1", c.regime.delta1);
        s.num("delta2", c.regime.delta2);
    }
    if (r.has("schedule")) {
        auto s = r.sub("schedule");
        s.allow({"offdiag_exponent", "H0"});
        s.num("offdiag_exponent", c.offdiag_exponent);
        if (!(c.offdiag_exponent > 1)) throw ConfigError(s.at("offdiag_exponent"), "must exceed 1");
        std::vector<double> H;
        s.numbers("H0", H);
        if (s.has("H0")) {
            if (H.size() != 3) throw ConfigError(s.at("H0"), "expected three components");
            c.H0 = {H[0], H[1], H[2]};
        }
    }
    if (r.has("grid")) {
        auto s = r.sub("grid");
        c.has_grid = true;
        s.allow({"domain", "delta", "R", "rect", "fft_size", "padding", "layers"});
        s.str("domain", c.grid.domain, {"disk", "half_disk", "rectangle"});
        s.positive("delta", c.grid.delta);
        s.positive("R", c.grid.R);
        std::vector<double> rect;
        s.numbers("rect", rect);
        if (s.has("rect")) {
            if (rect.size() != 4 || !(rect[1] > rect[0]) || !(rect[3] > rect[2]))
                throw ConfigError(s.at("rect"), "expected [x0, x1, y0, y1] with x0 < x1, y0 < y1");
            c.grid.rect = {rect[0], rect[1], rect[2], rect[3]};
        }
        s.integer("fft_size", c.grid.fft_size, 0);
        if (c.grid.fft_size != 0 && (c.grid.fft_size < 8 || (c.grid.fft_size & (c.grid.fft_size - 1)) != 0))
            throw ConfigError(s.at("fft_size"), "must be a power of two, at least 8");
        s.num("padding", c.grid.padding);
        if (s.has("padding") && c.grid.padding < 2) throw ConfigError(s.at("padding"), "must be at least 2");
        s.integer("layers", c.grid.layers, 1);
    }
    if (r.has("flow")) {
        auto s = r.sub("flow");
        s.allow({"tau", "max_iters", "grad_tol", "clamp", "momentum"});
        s.num("tau", c.flow.tau);
        if (c.flow.tau < 0) throw ConfigError(s.at("tau"), "must be non-negative (0 selects the default)");
        s.integer("max_iters", c.flow.max_iters, 0);
        s.positive("grad_tol", c.flow.grad_tol);
        s.boolean("clamp", c.flow.clamp);
        s.boolean("momentum", c.flow.momentum);
    }
    if (r.has("sweep")) {
        auto s = r.sub("sweep");
        s.allow({"h_values"});
        s.numbers("h_values", c.h_values);
        for (std::size_t i = 0; i < c.h_values.size(); ++i)
            if (!(c.h_values[i] > 0 && c.h_values[i] < 1))
                throw ConfigError(s.at("h_values") + "/" + std::to_string(i), "must lie in (0, 1)");
    }
    if (r.has("io")) {
        auto s = r.sub("io");
        s.allow({"out_dir", "seed"});
        s.str("out_dir", c.out_dir);
        s.integer("seed", c.seed, 0);
    }
    if (r.has("field")) {
        auto s = r.sub("field");
        s.allow({"kind", "seed", "path"});
        s.str("kind", c.field.kind, {"e1", "e2", "random", "random_planar", "csv"});
        s.integer("seed", c.field.seed, 0);
        s.str("path", c.field.path);
        if (c.field.kind == "csv" && c.field.path.empty()) throw ConfigError(s.at("path"), "required for kind csv");
    }
    r.str("problem", c.problem, {"vortex", "disk"});
    if (r.has("vortex")) {
        auto s = r.sub("vortex");
        s.allow({"epsilon", "a", "delta2", "bumps", "bump_amplitude"});
        s.positive("epsilon", c.vortex.epsilon);
        s.num("a", c.vortex.a);
        s.num("delta2", c.vortex.delta2);
        s.integer("bumps", c.vortex.bumps, 0);
        s.num("bump_amplitude", c.vortex.bump_amplitude);
        if (c.vortex.bump_amplitude < 0) throw ConfigError(s.at("bump_amplitude"), "must be non-negative");
    }
    if (r.has("pn")) {
        auto s = r.sub("pn");
        s.allow({"kind", "n", "sign", "alpha_bo", "shift", "lambda", "x1_min", "x1_max", "x1_count", "x2_values"});
        s.str("kind", c.pn.kind, {"constant", "periodic", "nonperiodic"});
        if (s.has("n")) {
            if (!s.raw("n").is_number_integer()) throw ConfigError(s.at("n"), "expected an integer");
            c.pn.n = s.raw("n").get<int>();
        }
        if (s.has("sign")) {
            if (!s.raw("sign").is_number_integer() || std::abs(s.raw("sign").get<int>()) != 1)
                throw ConfigError(s.at("sign"), "must be +1 or -1");
            c.pn.sign = s.raw("sign").get<int>();
        }
        s.num("alpha_bo", c.pn.alpha_bo);
        if (c.pn.kind == "periodic" && !(c.pn.alpha_bo > 1 && c.pn.alpha_bo < 2))
            throw ConfigError(s.at("alpha_bo"), "periodic solutions need alpha_bo in (1, 2)");
        s.num("shift", c.pn.shift);
        s.num("lambda", c.pn.lambda);
        s.num("x1_min", c.pn.x1_min);
        s.num("x1_max", c.pn.x1_max);
        if (!(c.pn.x1_max > c.pn.x1_min)) throw ConfigError(s.at("x1_max"), "must exceed x1_min");
        s.integer("x1_count", c.pn.x1_count, 2);
        s.numbers("x2_values", c.pn.x2_values);
        for (std::size_t i = 0; i < c.pn.x2_values.size(); ++i)
            if (c.pn.x2_values[i] < 0) throw ConfigError(s.at("x2_values") + "/" + std::to_string(i), "must be >= 0");
    }
    if (r.has("checks")) {
        const auto& a = r.raw("checks");
        if (a.is_string()) c.checks = {a.get<std::string>()};
        else if (a.is_array()) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (!a[i].is_string()) throw ConfigError("/checks/" + std::to_string(i), "expected a check name");
                c.checks.push_back(a[i].get<std::string>());
            }
        } else {
            throw ConfigError("/checks", "expected a name or an array of names");
        }
    }
    if (r.has("check_params")) {
        c.check_params = r.raw("check_params");
        if (!c.check_params.is_object()) throw ConfigError("/check_params", "expected an object keyed by check name");
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("/", "cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// CSV

// full round-trip precision
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw Error("cannot write '" + path + "'");
    }
    void comment(const std::string& s) { out_ << "# " << s << '\n'; }
    void header(const std::vector<std::string>& cols) { row_strings(cols); }
    void row_strings(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
        out_ << '\n';
    }
    template <class... Ts>
    void row(const Ts&... vals) {
        std::vector<std::string> cols{cell(vals)...};
        row_strings(cols);
    }

  private:
    static std::string cell(double v) { return fmt(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    std::ofstream out_;
};

// Field files: "# {json header}", a column header, node rows (layer-major),
// then boundary-trace rows in segment order.
inline nlohmann::ordered_json grid_header(const Grid2D& g) {
    nlohmann::ordered_json h;
    h["domain"] = to_string(g.kind);
    h["delta"] = g.delta;
    if (g.kind == DomainKind::rectangle) h["rect"] = {g.xmin, g.xmax, g.ymin, g.ymax};
    else h["R"] = g.radius;
    return h;
}

inline GridPtr grid_from_header(const nlohmann::json& h) {
    GridSpec s;
    s.domain = h.at("domain").get<std::string>();
    s.delta = h.at("delta").get<double>();
    if (h.contains("R")) s.R = h["R"].get<double>();
    if (h.contains("rect")) {
        auto r = h["rect"].get<std::vector<double>>();
        if (r.size() != 4) throw Error("field file: rect needs four numbers");
        s.rect = {r[0], r[1], r[2], r[3]};
    }
    if (s.domain != "disk" && s.domain != "half_disk" && s.domain != "rectangle")
        throw Error("field file: unknown domain '" + s.domain + "'");
    return s.build();
}

inline void write_angle_csv(const std::string& path, const AngleField& phi, nlohmann::ordered_json extra = {}) {
    const Grid2D& g = *phi.grid;
    CsvWriter w(path);
    nlohmann::ordered_json h;
    h["field"] = "angle";
    h["grid"] = grid_header(g);
    if (!extra.is_null()) h["meta"] = extra;
    w.comment(h.dump());
    w.header({"part", "index", "x1", "x2", "phi", "m1", "m2"});
    for (std::size_t a = 0; a < g.size(); ++a) {
        Vec2 x = g.pos(a);
        double f = phi.values[a];
        w.row("node", a, x[0], x[1], f, std::cos(f), std::sin(f));
    }
    std::size_t b = 0;
    for (const auto& seg : g.segments)
        for (const auto& p : seg.points) {
            double f = phi.trace[b];
            w.row(seg.name, b++, p[0], p[1], f, std::cos(f), std::sin(f));
        }
}

inline void write_vector_csv(const std::string& path, const VectorField3& m, nlohmann::ordered_json extra = {}) {
    const Grid2D& g = *m.grid;
    CsvWriter w(path);
    nlohmann::ordered_json h;
    h["field"] = "vector";
    h["layers"] = m.layers;
    h["grid"] = grid_header(g);
    if (!extra.is_null()) h["meta"] = extra;
    w.comment(h.dump());
    w.header({"part", "layer", "index", "x1", "x2", "x3", "m1", "m2", "m3"});
    for (int k = 0; k < m.layers; ++k)
        for (std::size_t a = 0; a < g.size(); ++a) {
            Vec2 x = g.pos(a);
            const Vec3& v = m.at(k, a);
            w.row("node", k, a, x[0], x[1], m.x3(k), v[0], v[1], v[2]);
        }
    for (int k = 0; k < m.layers; ++k) {
        std::size_t b = 0;
        for (const auto& seg : g.segments)
            for (const auto& p : seg.points) {
                const Vec3& v = m.trace_at(k, b);
                w.row(seg.name, k, b++, p[0], p[1], m.x3(k), v[0], v[1], v[2]);
            }
    }
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_number(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error("field file: bad number '" + s + "' " + where);
    }
}

}  // namespace detail

// Reads a vector field written by write_vector_csv; grid coordinates are
// checked against the grid rebuilt from the header.
inline VectorField3 read_vector_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (line.rfind("# ", 0) != 0) throw Error("field file: missing JSON header line");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line.substr(2));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("field file: bad header: ") + e.what());
    }
    if (h.value("field", "") != "vector") throw Error("field file: expected a vector field");
    auto g = grid_from_header(h.at("grid"));
    int layers = h.at("layers").get<int>();
    VectorField3 m;
    m.grid = g;
    m.layers = layers;
    m.values.resize(static_cast<std::size_t>(layers) * g->size());
    m.trace.resize(static_cast<std::size_t>(layers) * g->boundary_size());
    std::getline(in, line);  // column header
    std::size_t nodes = 0, traces = 0, lineno = 2;
    std::vector<Vec2> bpts;
    for (const auto& seg : g->segments)
        for (const auto& p : seg.points) bpts.push_back(p);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto c = detail::split_csv(line);
        std::string where = "at line " + std::to_string(lineno);
        if (c.size() != 9) throw Error("field file: expected 9 columns " + where);
        int k = static_cast<int>(detail::parse_number(c[1], where));
        auto idx = static_cast<std::size_t>(detail::parse_number(c[2], where));
        Vec2 x{detail::parse_number(c[3], where), detail::parse_number(c[4], where)};
        Vec3 v{detail::parse_number(c[6], where), detail::parse_number(c[7], where), detail::parse_number(c[8], where)};
        if (k < 0 || k >= layers) throw Error("field file: layer out of range " + where);
        if (c[0] == "node") {
            if (idx >= g->size()) throw Error("field file: node index out of range " + where);
            Vec2 p = g->pos(idx);
            if (std::hypot(p[0] - x[0], p[1] - x[1]) > 1e-9) throw Error("field file: node does not match grid " + where);
            m.at(k, idx) = v;
            ++nodes;
        } else {
            if (idx >= bpts.size()) throw Error("field file: boundary index out of range " + where);
            if (std::hypot(bpts[idx][0] - x[0], bpts[idx][1] - x[1]) > 1e-9)
                throw Error("field file: boundary point does not match grid " + where);
            m.trace[static_cast<std::size_t>(k) * g->boundary_size() + idx] = v;
            ++traces;
        }
    }
    if (nodes != m.values.size() || traces != m.trace.size()) throw Error("field file: incomplete field");
    m.unit_sphere = m.unit_defect() <= 1e-12;
    return m;
}

}  // namespace thinfilm
