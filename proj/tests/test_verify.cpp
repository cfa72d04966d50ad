#include <gtest/gtest.h>

#include "thinfilm/verify.hpp"

using namespace thinfilm;

TEST(Registry, ContainsEveryNamedCheck) {
    const char* names[] = {"gh_bounds",          "gh_limit1",         "bo_P1",           "bo_P2",
                           "bo_P3",              "bo_P4",             "integral_2pi",    "integrability_split",
                           "pn_harmonic",        "pn_boundary",       "explicit_integral", "vortex_layer",
                           "vortex_is_critical", "vortex_rescaling",  "dmi_bound_12",    "dmi_bound_3",
                           "coercivity_random",  "lifting_identity",  "strayfield_chain", "gamma_sweep",
                           "clamp_monotone"};
    auto all = check_names();
    for (const char* n : names) EXPECT_NE(std::find(all.begin(), all.end(), n), all.end()) << n;
    EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
}

TEST(Registry, UnknownNamesAndParametersAreRejected) {
    try {
        run_check("no_such_check");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("gh_bounds"), std::string::npos);
    }
    EXPECT_THROW(run_check("gh_bounds", {{"bogus", 1}}), Error);
    EXPECT_THROW(run_check("gh_bounds", {{"seed", -3}}), Error);
    EXPECT_THROW(run_check("gh_bounds", nlohmann::json::array()), Error);
}

class QuickCheck : public ::testing::TestWithParam<const char*> {};

TEST_P(QuickCheck, Passes) {
    auto r = run_check(GetParam());
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.check_name, GetParam());
    EXPECT_FALSE(r.measured.empty());
    for (const auto& m : r.measured) EXPECT_TRUE(m.ok()) << m.label << " = " << m.value << " > " << m.tolerance;
}

INSTANTIATE_TEST_SUITE_P(Analytic, QuickCheck,
                         ::testing::Values("gh_bounds", "gh_limit1", "bo_P1", "bo_P2", "bo_P3", "bo_P4",
                                           "integral_2pi", "integrability_split", "pn_harmonic", "pn_boundary",
                                           "explicit_integral", "vortex_layer", "vortex_is_critical",
                                           "vortex_rescaling", "lifting_identity"));

TEST(Reports, JsonIsReproducibleAndOmitsRuntime) {
    auto a = to_json(run_check("bo_P2")).dump();
    auto b = to_json(run_check("bo_P2")).dump();
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.find("runtime"), std::string::npos);
    auto j = to_json(run_check("bo_P2"));
    EXPECT_EQ(j["check_name"], "bo_P2");
    EXPECT_EQ(j["status"], "pass");
}

TEST(Reports, FailingMeasurementFailsTheReport) {
    CheckReport r;
    r.add("ok", 0.5, 1.0);
    r.add("bad", 2.0, 1.0);
    r.finalize();
    EXPECT_FALSE(r.pass);
    ASSERT_NE(r.find("bad"), nullptr);
    EXPECT_FALSE(r.find("bad")->ok());
    EXPECT_EQ(r.find("missing"), nullptr);
    // NaN never passes
    CheckReport n;
    n.add("nan", std::nan(""), 1.0);
    n.finalize();
    EXPECT_FALSE(n.pass);
}

TEST(Reports, SeedChangesRandomChecksDeterministically) {
    auto a = to_json(run_check("gh_bounds", {{"seed", 5}, {"samples", 200}})).dump();
    auto b = to_json(run_check("gh_bounds", {{"seed", 5}, {"samples", 200}})).dump();
    EXPECT_EQ(a, b);
}

TEST(RandomFields, UnitAndReproducible) {
    auto g = make_grid(Grid2D::disk(1.0 / 16));
    auto a = random_unit_field(g, 3, 9, true), b = random_unit_field(g, 3, 9, true);
    EXPECT_LE(a.unit_defect(), 1e-12);
    EXPECT_EQ(a.values, b.values);
    EXPECT_FALSE(a.x3_invariant());
    EXPECT_TRUE(random_unit_field(g, 3, 9, false).x3_invariant());
    auto p = random_planar_field(g, 4);
    for (const auto& v : p.values) EXPECT_NEAR(v[2], 0.0, 0.0);
}
