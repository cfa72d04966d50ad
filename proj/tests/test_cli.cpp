#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {
const fs::path kDir = fs::temp_directory_path() / "thinfilm_cli_test";

int run(const std::string& args) {
    fs::create_directories(kDir);
    std::string cmd = std::string(THINFILM_CLI) + " " + args + " > " + (kDir / "stdout.txt").string() + " 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}
std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
fs::path write(const std::string& name, const std::string& body) {
    fs::create_directories(kDir);
    auto p = kDir / name;
    std::ofstream(p) << body;
    return p;
}
}  // namespace

TEST(Cli, VerifyIsByteReproducible) {
    auto a = kDir / "a.json", b = kDir / "b.json";
    ASSERT_EQ(run("verify --check bo_P1 --check lifting_identity --seed 3 --json " + a.string()), 0);
    ASSERT_EQ(run("verify --check bo_P1 --check lifting_identity --seed 3 --json " + b.string()), 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_NE(slurp(a).find("\"seed\": 3"), std::string::npos);
}

TEST(Cli, FailingCheckExitsOne) {
    // the sweep's final tolerance is not reached on this grid
    EXPECT_EQ(run("verify --check gamma_sweep"), 1);
    EXPECT_NE(slurp(kDir / "stdout.txt").find("FAIL gamma_sweep"), std::string::npos);
}

TEST(Cli, InputErrorsExitTwo) {
    EXPECT_EQ(run("verify --check does_not_exist"), 2);
    EXPECT_NE(slurp(kDir / "stdout.txt").find("registered checks"), std::string::npos);
    auto bad = write("bad.json", R"({"regime": {"alpha": 1, "typo": 2}})");
    EXPECT_EQ(run("energy --config " + bad.string()), 2);
    EXPECT_NE(slurp(kDir / "stdout.txt").find("/regime/typo"), std::string::npos);
    EXPECT_EQ(run("gamma-sweep --out " + kDir.string()), 2);  // no thicknesses
    EXPECT_EQ(run("gamma-sweep --h-values 0.001 0.01 --out " + kDir.string()), 2);  // not decreasing
    EXPECT_EQ(run("stray-sweep --h-values 0.5 --out " + kDir.string()), 2);
    EXPECT_EQ(run("no-such-command"), 2);
    auto params = write("params.json", R"({"check_params": {"bo_P1": {"nope": 1}}})");
    EXPECT_EQ(run("verify --check bo_P1 --config " + params.string()), 2);
}

TEST(Cli, SweepsWriteCsv) {
    auto out = kDir / "sweep";
    EXPECT_EQ(run("gamma-sweep --h-values 0.01 0.001 --out " + out.string()), 0);
    auto csv = slurp(out / "gamma_sweep.csv");
    EXPECT_EQ(csv.rfind("h,Eh_total,E0_total,rel_gap", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_EQ(run("stray-sweep --h-values 0.01 0.001 --out " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "stray_sweep.csv"));
    EXPECT_EQ(run("energy --h-values 0.001 --out " + out.string()), 0);
    EXPECT_NE(slurp(out / "energy.json").find("\"E0\""), std::string::npos);
}

TEST(Cli, PnSolutionsAndQuiver) {
    auto out = kDir / "pn";
    EXPECT_EQ(run("pn-solutions --kind periodic --lambda 0.25 --alpha-bo 1.4 --quiver --out " + out.string()), 0);
    auto csv = slurp(out / "pn_solutions.csv");
    EXPECT_EQ(csv.rfind("kind,x1,x2,f,boundary_residual", 0), 0u);
    EXPECT_TRUE(fs::exists(out / "vortex_quiver.csv"));
    EXPECT_EQ(run("pn-solutions --kind periodic --alpha-bo 2.5 --out " + out.string()), 2);
}

TEST(Cli, MinimizeWritesFieldAndTrace) {
    auto out = kDir / "min";
    auto cfg = write("min.json", R"({"vortex": {"bumps": 2}, "flow": {"grad_tol": 1e-3, "clamp": true},
                                     "grid": {"domain": "half_disk", "R": 2.0, "delta": 0.0625}})");
    EXPECT_EQ(run("minimize --config " + cfg.string() + " --out " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "minimize_field.csv"));
    auto trace = slurp(out / "minimize_trace.csv");
    EXPECT_EQ(trace.rfind("iteration,energy", 0), 0u);
    auto cap = write("cap.json", R"({"vortex": {"bumps": 2}, "flow": {"grad_tol": 1e-9, "max_iters": 5}})");
    EXPECT_EQ(run("minimize --config " + cap.string() + " --out " + out.string()), 1);
}
