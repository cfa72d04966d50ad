#include <gtest/gtest.h>

#include <filesystem>

#include "thinfilm/io.hpp"
#include "thinfilm/verify.hpp"

using namespace thinfilm;
using nlohmann::json;

namespace {
std::string error_path(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.path;
    }
    return "<accepted>";
}
}  // namespace

TEST(Config, DefaultsAndOverrides) {
    auto c = parse_config(json::parse(R"({
        "regime": {"alpha": 0.7, "delta2": 0.2},
        "schedule": {"H0": [0, 0, 1], "offdiag_exponent": 1.8},
        "grid": {"delta": 0.03125, "padding": 2, "layers": 3},
        "flow": {"tau": 1e-4, "max_iters": 50, "clamp": true},
        "sweep": {"h_values": [0.01, 0.001]},
        "io": {"out_dir": "x", "seed": 12},
        "checks": ["bo_P1"],
        "check_params": {"bo_P1": {"samples": 10}}
    })"));
    EXPECT_EQ(c.regime.alpha, 0.7);
    EXPECT_EQ(c.regime.delta2, 0.2);
    EXPECT_EQ(c.H0[2], 1.0);
    EXPECT_EQ(c.offdiag_exponent, 1.8);
    EXPECT_EQ(c.grid.layers, 3);
    EXPECT_TRUE(c.has_grid);
    EXPECT_TRUE(c.flow.clamp);
    EXPECT_EQ(c.flow.max_iters, 50);
    EXPECT_EQ(c.h_values.size(), 2u);
    EXPECT_EQ(c.seed, 12u);
    EXPECT_EQ(c.checks.at(0), "bo_P1");
    auto d = parse_config(json::object());
    EXPECT_EQ(d.regime.alpha, 1.0);
    EXPECT_FALSE(d.has_grid);
}

TEST(Config, ErrorsNameTheOffendingPath) {
    EXPECT_EQ(error_path(json::parse(R"({"bogus": 1})")), "/bogus");
    EXPECT_EQ(error_path(json::parse(R"({"regime": {"alpha": -1}})")), "/regime/alpha");
    EXPECT_EQ(error_path(json::parse(R"({"regime": {"alpha": "x"}})")), "/regime/alpha");
    EXPECT_EQ(error_path(json::parse(R"({"regime": {"gamma": 1}})")), "/regime/gamma");
    EXPECT_EQ(error_path(json::parse(R"({"grid": {"fft_size": 100}})")), "/grid/fft_size");
    EXPECT_EQ(error_path(json::parse(R"({"grid": {"padding": 1}})")), "/grid/padding");
    EXPECT_EQ(error_path(json::parse(R"({"sweep": {"h_values": [0.01, 2]}})")), "/sweep/h_values/1");
    EXPECT_EQ(error_path(json::parse(R"({"schedule": {"H0": [1, 2]}})")), "/schedule/H0");
    EXPECT_EQ(error_path(json::parse(R"({"pn": {"sign": 2}})")), "/pn/sign");
    EXPECT_EQ(error_path(json::parse(R"({"pn": {"kind": "periodic", "alpha_bo": 2.5}})")), "/pn/alpha_bo");
    EXPECT_EQ(error_path(json::parse(R"({"field": {"kind": "csv"}})")), "/field/path");
    EXPECT_EQ(error_path(json::parse(R"({"checks": 3})")), "/checks");
    EXPECT_EQ(error_path(json::parse(R"([1, 2])")), "/");
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Csv, NumbersRoundTrip) {
    for (double v : {0.1, pi, -1e-300, 6.02214076e23}) EXPECT_EQ(std::stod(fmt(v)), v);
}

TEST(Csv, VectorFieldRoundTrip) {
    auto dir = std::filesystem::temp_directory_path() / "thinfilm_io_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "field.csv").string();
    auto g = make_grid(Grid2D::disk(1.0 / 8));
    auto m = random_unit_field(g, 2, 3, true);
    write_vector_csv(path, m);
    auto r = read_vector_csv(path);
    EXPECT_EQ(r.layers, 2);
    EXPECT_EQ(r.values, m.values);
    EXPECT_EQ(r.trace, m.trace);
    EXPECT_EQ(r.grid->size(), g->size());

    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first.rfind("# {", 0), 0u);
}

TEST(Csv, CorruptFilesAreRejected) {
    auto dir = std::filesystem::temp_directory_path() / "thinfilm_io_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "bad.csv").string();
    {
        std::ofstream(path) << "no header\n";
    }
    EXPECT_THROW(read_vector_csv(path), Error);
    auto g = make_grid(Grid2D::disk(1.0 / 8));
    write_vector_csv(path, random_unit_field(g, 1, 3, false));
    {
        // drop the last row
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string s = ss.str();
        s.erase(s.find_last_of('\n', s.size() - 2) + 1);
        std::ofstream(path) << s;
    }
    EXPECT_THROW(read_vector_csv(path), Error);
    EXPECT_THROW(read_vector_csv((dir / "missing.csv").string()), Error);
}

TEST(Csv, AngleFieldHasHeaderAndRows) {
    auto dir = std::filesystem::temp_directory_path() / "thinfilm_io_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "angle.csv").string();
    auto g = make_grid(Grid2D::half_disk(1.0, 1.0 / 4));
    write_angle_csv(path, sample_scalar(g, [](double x, double) { return x; }), {{"note", "t"}});
    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    std::getline(in, line);
    auto h = json::parse(line.substr(2));
    EXPECT_EQ(h["field"], "angle");
    EXPECT_EQ(h["grid"]["domain"], "half_disk");
    std::getline(in, line);
    EXPECT_EQ(line, "part,index,x1,x2,phi,m1,m2");
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, g->size() + g->boundary_size());
}
