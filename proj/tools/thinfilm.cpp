// Command-line front end: verification checks, energy evaluation, thickness
// sweeps, gradient flows and explicit Peierls-Nabarro solution tables.
//
// Exit codes: 0 success, 1 a check or run-level criterion failed, 2 bad input.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "thinfilm/io.hpp"
#include "thinfilm/verify.hpp"

using namespace thinfilm;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string json_path;  // "-" prints to stdout
    bool json = false;
};

struct Context {
    ExperimentConfig cfg;
    std::uint64_t seed = 7;
    fs::path out;
};

Context make_context(const Common& c) {
    Context ctx;
    if (!c.config_path.empty()) ctx.cfg = load_config(c.config_path);
    ctx.seed = c.seed.value_or(ctx.cfg.seed);
    ctx.out = c.out_dir.empty() ? fs::path(ctx.cfg.out_dir) : fs::path(c.out_dir);
    return ctx;
}

fs::path output_file(const Context& ctx, const std::string& name) {
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) throw Error("cannot create output directory '" + ctx.out.string() + "'");
    return ctx.out / name;
}

void emit_json(const Common& c, const ojson& j) {
    if (!c.json) return;
    if (c.json_path.empty() || c.json_path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(c.json_path);
    if (!f) throw Error("cannot write '" + c.json_path + "'");
    f << j.dump(2) << '\n';
}

ojson breakdown_json(const EnergyBreakdown& e) {
    ojson j;
    j["exchange"] = e.exchange;
    j["dmi_inplane"] = e.dmi_inplane;
    j["dmi_vertical"] = e.dmi_vertical;
    j["stray"] = e.stray;
    j["anisotropy"] = e.anisotropy;
    j["zeeman"] = e.zeeman;
    j["total"] = e.total;
    return j;
}

// copies of layer 0 stacked to the requested count (x3-independent input)
VectorField3 with_layers(const VectorField3& p, int layers) {
    if (p.layers == layers) return p;
    if (!p.x3_invariant()) throw Error("field has x3 dependence; layer count must match");
    VectorField3 m = p;
    m.layers = layers;
    m.values.clear();
    m.trace.clear();
    const auto n = static_cast<std::ptrdiff_t>(p.n()), nb = static_cast<std::ptrdiff_t>(p.nb());
    for (int k = 0; k < layers; ++k) {
        m.values.insert(m.values.end(), p.values.begin(), p.values.begin() + n);
        m.trace.insert(m.trace.end(), p.trace.begin(), p.trace.begin() + nb);
    }
    return m;
}

// field on the disk grid from the config
VectorField3 config_field(const Context& ctx, const GridPtr& g, int layers) {
    const auto& f = ctx.cfg.field;
    if (f.kind == "csv") return with_layers(read_vector_csv(f.path), layers);
    if (f.kind == "random") return random_unit_field(g, layers, f.seed, false);
    if (f.kind == "random_planar") return with_layers(random_planar_field(g, f.seed), layers);
    Vec3 v = f.kind == "e2" ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
    return sample_vector(
        g, layers, [v](double, double, double) { return v; }, true);
}

GridPtr disk_grid(const Context& ctx) {
    if (ctx.cfg.grid.domain != "disk") throw ConfigError("/grid/domain", "this command runs on the disk");
    return ctx.cfg.grid.build();
}

std::vector<double> sweep_values(const Context& ctx, const std::vector<double>& cli) {
    std::vector<double> hs = cli.empty() ? ctx.cfg.h_values : cli;
    if (hs.empty()) throw ConfigError("/sweep/h_values", "empty list of thicknesses");
    for (std::size_t i = 0; i < hs.size(); ++i) {
        std::string at = "/sweep/h_values/" + std::to_string(i);
        if (!(hs[i] > 0 && hs[i] < 0.1)) throw ConfigError(at, "thickness must lie in (0, 0.1)");
        if (i > 0 && !(hs[i] < hs[i - 1])) throw ConfigError(at, "thicknesses must be strictly decreasing");
    }
    return hs;
}

// ---------------------------------------------------------------------------

int cmd_verify(const Common& c, std::vector<std::string> names) {
    Context ctx = make_context(c);
    if (names.empty()) names = ctx.cfg.checks;
    if (names.empty() || (names.size() == 1 && names[0] == "all")) names = check_names();
    const auto& reg = registry();
    for (const auto& n : names)
        if (!reg.count(n)) {
            std::string msg = "unknown check '" + n + "'; registered checks:";
            for (const auto& k : check_names()) msg += " " + k;
            throw ConfigError("/checks", msg);
        }
    ojson out;
    out["seed"] = ctx.seed;
    auto& arr = out["checks"] = ojson::array();
    bool all = true;
    for (const auto& n : names) {
        nlohmann::json params = ctx.cfg.check_params.contains(n) ? ctx.cfg.check_params[n] : nlohmann::json::object();
        if (!params.is_object()) throw ConfigError("/check_params/" + n, "expected an object");
        if (!params.contains("seed")) params["seed"] = ctx.seed;
        CheckReport r;
        try {
            r = run_check(n, params);
        } catch (const Error& e) {
            if (std::string(e.what()).rfind("unknown check parameter", 0) == 0)
                throw ConfigError("/check_params/" + n, e.what());
            throw;
        }
        all &= r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << n << '\n';
        for (const auto& m : r.measured)
            std::cout << "    " << m.label << " = " << fmt(m.value) << " (tol " << fmt(m.tolerance) << ")"
                      << (m.ok() ? "" : "  <-- exceeds") << '\n';
        arr.push_back(to_json(r));
    }
    out["all_pass"] = all;
    emit_json(c, out);
    return all ? 0 : 1;
}

int cmd_energy(const Common& c, const std::vector<double>& hcli) {
    Context ctx = make_context(c);
    auto g = disk_grid(ctx);
    auto ts = ctx.cfg.schedule();
    auto m3 = config_field(ctx, g, ctx.cfg.grid.layers);
    std::vector<double> hs = hcli.empty() ? ctx.cfg.h_values : hcli;
    if (hs.empty()) hs = {1e-2, 1e-3, 1e-4};
    EhOptions opt;
    opt.spectral = ctx.cfg.grid.spectral(*g);
    ojson out;
    out["field"] = ctx.cfg.field.kind;
    out["layers"] = m3.layers;
    if (m3.x3_invariant()) {
        VectorField3 m2 = m3;
        m2.layers = 1;
        m2.values.resize(m3.n());
        m2.trace.resize(m3.nb());
        E0Options e0;
        e0.H0 = constant_field(ctx.cfg.H0);
        out["E0"] = breakdown_json(energy_E0(m2, ts.rp, e0));
    }
    auto& rows = out["Eh"] = ojson::array();
    for (double h : hs) {
        auto e = energy_Eh(m3, ts, h, opt);
        ojson j = breakdown_json(e);
        j["h"] = h;
        rows.push_back(j);
        std::cout << "h=" << fmt(h) << " total=" << fmt(e.total) << '\n';
    }
    std::ofstream(output_file(ctx, "energy.json")) << out.dump(2) << '\n';
    emit_json(c, out);
    return 0;
}

int cmd_gamma_sweep(const Common& c, const std::vector<double>& hcli) {
    Context ctx = make_context(c);
    auto hs = sweep_values(ctx, hcli);
    auto g = disk_grid(ctx);
    auto ts = ctx.cfg.schedule();
    auto m3 = config_field(ctx, g, ctx.cfg.grid.layers);
    auto m2 = config_field(ctx, g, 1);
    if (!m3.x3_invariant()) throw ConfigError("/field/kind", "the sweep compares against an x3-independent limit");
    E0Options e0;
    e0.H0 = constant_field(ctx.cfg.H0);
    CsvWriter w(output_file(ctx, "gamma_sweep.csv").string());
    w.header({"h", "Eh_total", "E0_total", "rel_gap", "Eh_exchange", "Eh_dmi_inplane", "Eh_dmi_vertical", "Eh_stray",
              "Eh_anisotropy", "Eh_zeeman"});
    ojson out;
    auto& rows = out["rows"] = ojson::array();
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (double h : hs) {
        checks::SweepRow r = checks::gamma_sweep_row(m3, m2, ts, h, e0);
        monotone &= r.rel_gap <= prev;
        prev = r.rel_gap;
        w.row(h, r.Eh.total, r.E0.total, r.rel_gap, r.Eh.exchange, r.Eh.dmi_inplane, r.Eh.dmi_vertical, r.Eh.stray,
              r.Eh.anisotropy, r.Eh.zeeman);
        std::cout << "h=" << fmt(h) << " Eh=" << fmt(r.Eh.total) << " E0=" << fmt(r.E0.total)
                  << " rel_gap=" << fmt(r.rel_gap) << '\n';
        rows.push_back(ojson{{"h", h}, {"Eh", r.Eh.total}, {"E0", r.E0.total}, {"rel_gap", r.rel_gap}});
    }
    out["rel_gap_nonincreasing"] = monotone;
    emit_json(c, out);
    return monotone ? 0 : 1;
}

int cmd_stray_sweep(const Common& c, const std::vector<double>& hcli) {
    Context ctx = make_context(c);
    auto hs = sweep_values(ctx, hcli);
    auto g = disk_grid(ctx);
    auto m = config_field(ctx, g, ctx.cfg.grid.layers);
    auto sg = ctx.cfg.grid.spectral(*g);
    double target = asymptotic_boundary_term(m);
    CsvWriter w(output_file(ctx, "stray_sweep.csv").string());
    w.header({"h", "I", "I_ratio", "fft_ratio", "asymptotic", "rel_gap"});
    ojson out;
    auto& rows = out["rows"] = ojson::array();
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (double h : hs) {
        double L = h * std::abs(std::log(h));
        double I = boundary_charge_I(m, h).value;
        double ratio = I / (4 * pi * h * L);
        double fft = fourier_stray_energy(m, h, sg) / (h * L);
        double gap = std::abs(ratio - target) / target;
        monotone &= gap <= prev;
        prev = gap;
        w.row(h, I, ratio, fft, target, gap);
        std::cout << "h=" << fmt(h) << " I_ratio=" << fmt(ratio) << " fft_ratio=" << fmt(fft)
                  << " rel_gap=" << fmt(gap) << '\n';
        rows.push_back(ojson{{"h", h}, {"I_ratio", ratio}, {"fft_ratio", fft}, {"rel_gap", gap}});
    }
    out["asymptotic"] = target;
    out["rel_gap_nonincreasing"] = monotone;
    emit_json(c, out);
    return monotone ? 0 : 1;
}

void write_trace(const fs::path& p, const std::vector<double>& trace) {
    CsvWriter w(p.string());
    w.header({"iteration", "energy"});
    for (std::size_t k = 0; k < trace.size(); ++k) w.row(k, trace[k]);
}

int cmd_minimize(const Common& c) {
    Context ctx = make_context(c);
    const auto& cfg = ctx.cfg;
    ojson out;
    out["problem"] = cfg.problem;
    FlowResult flow;
    if (cfg.problem == "vortex") {
        VortexProfile<double> v{cfg.vortex.epsilon, cfg.vortex.a, cfg.vortex.delta2};
        auto rp = checks::vortex_regime(v);
        double R = cfg.has_grid ? cfg.grid.R : 8 * v.epsilon;
        double D = cfg.has_grid ? cfg.grid.delta : v.epsilon / 16;
        auto g = make_grid(Grid2D::half_disk(R, D));
        auto bumps = random_bumps(ctx.seed, cfg.vortex.bumps, R, v.epsilon, cfg.vortex.bump_amplitude);
        auto init = sample_scalar(g, [&](double x1, double x2) {
            double f = vortex_phi(v, x1, x2);
            for (const auto& b : bumps) f += b(x1, x2);
            return f;
        });
        FlowConfig fc = cfg.flow;
        fc.dirichlet = [v](double x1, double x2) { return vortex_phi(v, x1, x2); };
        flow = flow_Eeps(init, rp, fc);
        auto exact = vortex_field(g, v);
        double sup = 0;
        for (std::size_t a = 0; a < g->size(); ++a)
            sup = std::max(sup, std::abs(flow.phi.values[a] - exact.values[a]));
        out["sup_distance_to_vortex"] = sup;
        auto el = el_residual(flow.phi, rp);
        out["el_residual_interior"] = el.interior;
        out["el_residual_boundary"] = el.boundary;
    } else {
        auto g = disk_grid(ctx);
        auto m = config_field(ctx, g, 1);
        auto init = sample_scalar(g, [](double, double) { return 0.0; });
        for (std::size_t a = 0; a < g->size(); ++a) init.values[a] = std::atan2(m.values[a][1], m.values[a][0]);
        for (std::size_t b = 0; b < g->boundary_size(); ++b) init.trace[b] = std::atan2(m.trace[b][1], m.trace[b][0]);
        auto res = flow_E0_disk(init, cfg.regime, cfg.flow, cfg.H0);
        flow = std::move(res.flow);
        out["breakdown"] = breakdown_json(res.breakdown);
    }
    write_angle_csv(output_file(ctx, "minimize_field.csv").string(), flow.phi,
                    ojson{{"problem", cfg.problem}, {"seed", ctx.seed}});
    write_trace(output_file(ctx, "minimize_trace.csv"), flow.energy_trace);
    out["status"] = flow.status();
    out["iterations"] = flow.iterations;
    out["final_energy"] = flow.energy_trace.back();
    out["grad_sup"] = flow.grad_sup;
    std::cout << cfg.problem << ": " << flow.status() << " after " << flow.iterations
              << " iterations, energy=" << fmt(flow.energy_trace.back()) << '\n';
    emit_json(c, out);
    return flow.converged ? 0 : 1;
}

struct PNCli {
    std::optional<std::string> kind;
    std::optional<double> lambda, alpha_bo, shift;
    std::optional<int> n, sign;
    bool quiver = false;
};

int cmd_pn(const Common& c, const PNCli& o) {
    Context ctx = make_context(c);
    PNSpec s = ctx.cfg.pn;
    if (o.kind) s.kind = *o.kind;
    if (o.lambda) s.lambda = *o.lambda;
    if (o.alpha_bo) s.alpha_bo = *o.alpha_bo;
    if (o.shift) s.shift = *o.shift;
    if (o.n) s.n = *o.n;
    if (o.sign) s.sign = *o.sign;
    if (s.kind == "periodic" && !(s.alpha_bo > 1 && s.alpha_bo < 2))
        throw ConfigError("/pn/alpha_bo", "periodic solutions need alpha_bo in (1, 2)");
    if (s.sign != 1 && s.sign != -1) throw ConfigError("/pn/sign", "must be +1 or -1");
    auto sol = s.solution();
    CsvWriter w(output_file(ctx, "pn_solutions.csv").string());
    w.header({"kind", "x1", "x2", "f", "boundary_residual"});
    double worst = 0;
    for (int i = 0; i < s.x1_count; ++i) {
        double x1 = s.x1_min + (s.x1_max - s.x1_min) * i / (s.x1_count - 1);
        double res = pn_boundary_residual(sol, x1);
        worst = std::max(worst, std::abs(res));
        for (double x2 : s.x2_values) w.row(std::string(to_string(sol.kind)), x1, x2, pn_eval(sol, x1, x2), res);
    }
    if (o.quiver) {
        VortexProfile<double> v{0.5, 0.0, 0.1};
        CsvWriter q(output_file(ctx, "vortex_quiver.csv").string());
        q.header({"x1", "x2", "phi", "m1", "m2"});
        for (int j = 0; j <= 16; ++j)
            for (int i = -16; i <= 16; ++i) {
                double x1 = 0.25 * i, x2 = 0.25 * j;
                double f = vortex_phi(v, x1, x2);
                q.row(x1, x2, f, std::cos(f), std::sin(f));
            }
    }
    std::cout << to_string(sol.kind) << ": max |boundary residual| = " << fmt(worst) << '\n';
    emit_json(c, ojson{{"kind", to_string(sol.kind)}, {"max_boundary_residual", worst}});
    return worst <= 1e-9 ? 0 : 1;
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "random seed (overrides io.seed)");
    app->add_option("--out", c.out_dir, "output directory (overrides io.out_dir)");
    app->add_option("--json", c.json_path, "write a JSON summary to PATH (or stdout)")->expected(0, 1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thin-film micromagnetics: energies, limits and verification"};
    app.require_subcommand(1);
    Common c;

    auto* verify = app.add_subcommand("verify", "run registered verification checks");
    std::vector<std::string> names;
    verify->add_option("--check", names, "check name, repeatable, or 'all'");
    auto* list = verify->add_flag("--list", "print the registered check names");

    auto* energy = app.add_subcommand("energy", "energy breakdown of a configured field");
    auto* gamma = app.add_subcommand("gamma-sweep", "thin-film energy against the limit over h");
    auto* stray = app.add_subcommand("stray-sweep", "boundary charge energy against its asymptotic term");
    std::vector<double> hs;
    for (auto* s : {energy, gamma, stray}) s->add_option("--h-values", hs, "thickness values (strictly decreasing)");

    auto* minimize = app.add_subcommand("minimize", "gradient flow from a configured start");
    auto* pn = app.add_subcommand("pn-solutions", "tabulate explicit half-plane solutions");
    PNCli po;
    pn->add_option("--kind", po.kind)->check(CLI::IsMember({"constant", "periodic", "nonperiodic"}));
    pn->add_option("--lambda", po.lambda);
    pn->add_option("--n", po.n);
    pn->add_option("--sign", po.sign);
    pn->add_option("--alpha-bo", po.alpha_bo);
    pn->add_option("--shift", po.shift);
    pn->add_flag("--quiver", po.quiver, "also write the vortex quiver table");

    for (auto* s : {verify, energy, gamma, stray, minimize, pn}) add_common(s, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    for (auto* s : {verify, energy, gamma, stray, minimize, pn}) {
        auto* opt = s->get_option("--json");
        if (opt->count() > 0) c.json = true;
    }

    try {
        if (verify->parsed()) {
            if (list->count()) {
                for (const auto& n : check_names()) std::cout << n << '\n';
                return 0;
            }
            return cmd_verify(c, names);
        }
        if (energy->parsed()) return cmd_energy(c, hs);
        if (gamma->parsed()) return cmd_gamma_sweep(c, hs);
        if (stray->parsed()) return cmd_stray_sweep(c, hs);
        if (minimize->parsed()) return cmd_minimize(c);
        if (pn->parsed()) return cmd_pn(c, po);
    } catch (const ConfigError& e) {
        std::cerr << "config error at " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
