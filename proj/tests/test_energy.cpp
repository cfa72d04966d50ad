#include <gtest/gtest.h>

#include "oracles.hpp"
#include "thinfilm/energy.hpp"
#include "thinfilm/verify.hpp"

using namespace thinfilm;

namespace {
GridPtr disk(double d = 1.0 / 32) { return make_grid(Grid2D::disk(d)); }
VectorField3 constant(const GridPtr& g, int layers, Vec3 v) {
    return sample_vector(
        g, layers, [v](double, double, double) { return v; }, true);
}
}  // namespace

TEST(Regime, ValidationAndDerivedEpsilon) {
    RegimeParams rp;
    rp.alpha = 0.5;
    EXPECT_NEAR(rp.epsilon(), pi, 1e-15);
    rp.alpha = 0.0;
    EXPECT_THROW(rp.validate(), Error);
    rp.alpha = 1.0;
    rp.beta = -0.1;
    EXPECT_THROW(rp.validate(), Error);
    rp.beta = 0.0;
    rp.delta1 = std::nan("");
    EXPECT_THROW(rp.validate(), Error);
}

TEST(Schedule, DefaultValuesAtOneThickness) {
    RegimeParams rp;
    rp.alpha = 1.3;
    rp.beta = 0.4;
    rp.gamma_zeeman = 0.2;
    rp.delta1 = 0.5;
    rp.delta2 = -0.25;
    auto ts = ThicknessSchedule::standard(rp);
    double h = 1e-3, L = h * std::log(1e3);
    auto P = ts.at(h);
    EXPECT_NEAR(P.log_scale, L, 1e-18);
    EXPECT_NEAR(P.d2, 1.3 * L, 1e-18);
    EXPECT_NEAR(P.Q, 0.4 * L, 1e-18);
    EXPECT_NEAR(P.D[0][2], 2 * 0.5 * 1.3 * L, 1e-18);
    EXPECT_NEAR(P.D[1][2], -2 * 0.25 * 1.3 * L, 1e-18);
    double small = std::pow(h, 1.5) * std::log(1e3);
    for (auto [j, k] : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}})
        EXPECT_NEAR(P.D[j][k], small, 1e-18);
    EXPECT_NEAR(P.zeeman_scale, 0.2 * L, 1e-18);
    EXPECT_THROW(ts.at(0.0), Error);
    EXPECT_THROW(ts.at(1.0), Error);
    EXPECT_THROW(ThicknessSchedule::standard(rp, {0, 0, 0}, 1.0), Error);
}

TEST(LimitEnergy, UniformInPlaneFieldCostsOneHalf) {
    RegimeParams rp;
    auto e = energy_E0(constant(disk(), 1, {1, 0, 0}), rp);
    EXPECT_NEAR(e.stray, 0.5, 1e-12);
    EXPECT_NEAR(e.total, 0.5, 1e-12);
    EXPECT_NEAR(e.exchange, 0.0, 1e-14);
}

TEST(LimitEnergy, PerpendicularFieldAnisotropyAndZeeman) {
    RegimeParams rp;
    rp.beta = 0.7;
    rp.gamma_zeeman = 0.3;
    E0Options opt;
    opt.H0 = constant_field({0, 0, 1});
    auto e = energy_E0(constant(disk(), 1, {0, 0, 1}), rp, opt);
    EXPECT_NEAR(e.anisotropy, 0.7 * pi, 1e-12);
    EXPECT_NEAR(e.zeeman, -2 * 0.3 * pi, 1e-12);
    EXPECT_NEAR(e.stray, 0.0, 1e-14);
}

TEST(LimitEnergy, LinearAngleFieldAgainstQuadrature) {
    RegimeParams rp;
    rp.alpha = 0.8;
    rp.delta1 = 0.3;
    rp.delta2 = -0.6;
    const double k = 1.7, l = 0.4;
    auto g = disk();
    auto phi = sample_scalar(g, [&](double x, double y) { return k * x + l * y; });
    auto e = energy_E0(phi, rp);
    EXPECT_NEAR(e.exchange, 0.8 * (k * k + l * l) * pi, 1e-10);
    // wedge(d_j m, m) = -d_j theta
    EXPECT_NEAR(e.dmi_inplane, -2 * 0.8 * (0.3 * k - 0.6 * l) * pi, 1e-10);
    double bnd = oracle::gk(
                     [&](double t) {
                         double th = k * std::cos(t) + l * std::sin(t);
                         return std::pow(std::cos(th - t), 2);
                     },
                     0.0, 2 * pi) /
                 (2 * pi);
    EXPECT_NEAR(e.stray, bnd, 1e-10);
}

TEST(LimitEnergy, RejectsMultiLayerAndNonUnitFields) {
    RegimeParams rp;
    EXPECT_THROW(energy_E0(constant(disk(1.0 / 8), 2, {1, 0, 0}), rp), Error);
    auto g = disk(1.0 / 8);
    auto m = sample_vector(
        g, 1, [](double, double, double) { return Vec3{0.5, 0, 0}; }, false);
    EXPECT_THROW(energy_E0(m, rp), Error);
}

TEST(HalfPlaneEnergy, LinearPhaseOnRectangle) {
    RegimeParams rp;
    rp.alpha = 0.3;
    rp.delta1 = 0.2;
    rp.delta2 = 0.5;
    const double k = 1.2, l = -0.7;
    auto g = make_grid(Grid2D::rectangle(-1.0, 1.0, 0.0, 1.0, 1.0 / 64));
    auto phi = sample_scalar(g, [&](double x, double y) { return k * x + l * y; });
    double eps = rp.epsilon();
    double expect = 0.5 * (k * k + l * l) * 2 - (0.2 * k + 0.5 * l) * 2 + (1 - std::sin(2 * k) / (2 * k)) / (2 * eps);
    EXPECT_NEAR(energy_Eeps(phi, rp), expect, 2e-4);
}

TEST(Lifting, PhaseRuleIsExactComponentRuleConvergesAtSecondOrder) {
    RegimeParams rp;
    rp.alpha = 0.9;
    rp.delta1 = 0.4;
    rp.delta2 = -0.2;
    auto make = [](double d) {
        auto g = make_grid(Grid2D::half_disk(1.0, d));
        return sample_vector(
            g, 1,
            [](double x, double y, double) {
                double t = 2 * x + std::sin(3 * y);
                return Vec3{std::cos(t), std::sin(t), 0};
            },
            true);
    };
    EXPECT_LE(std::abs(lifting_consistency(make(1.0 / 32), rp).gap), 1e-12);
    double g1 = std::abs(lifting_consistency(make(1.0 / 16), rp, GradientRule::components).gap);
    double g2 = std::abs(lifting_consistency(make(1.0 / 32), rp, GradientRule::components).gap);
    double g3 = std::abs(lifting_consistency(make(1.0 / 64), rp, GradientRule::components).gap);
    EXPECT_GT(std::log2(g1 / g2), 1.7);
    EXPECT_GT(std::log2(g2 / g3), 1.7);
}

TEST(ThinFilmEnergy, ConstantPerpendicularField) {
    RegimeParams rp;
    rp.beta = 0.6;
    rp.gamma_zeeman = -0.4;
    auto ts = ThicknessSchedule::standard(rp, {0, 0, 1});
    EhOptions opt;
    opt.stray = StrayMode::omit;
    auto e = energy_Eh(constant(disk(), 2, {0, 0, 1}), ts, 1e-3, opt);
    EXPECT_NEAR(e.exchange, 0.0, 1e-12);
    EXPECT_NEAR(e.dmi_inplane, 0.0, 1e-12);
    EXPECT_NEAR(e.dmi_vertical, 0.0, 1e-12);
    EXPECT_EQ(e.stray, 0.0);
    EXPECT_NEAR(e.anisotropy, 0.6 * pi, 1e-12);
    EXPECT_NEAR(e.zeeman, -2 * -0.4 * pi, 1e-12);
    EXPECT_NEAR(e.total, e.sum_parts(), 0.0);
}

TEST(ThinFilmEnergy, InPlaneRotationExchangeAndDmi) {
    RegimeParams rp;
    rp.alpha = 1.1;
    rp.delta1 = 0.35;
    auto ts = ThicknessSchedule::standard(rp);
    const double k = 2.0, h = 1e-3;
    auto g = disk();
    auto m = sample_vector(
        g, 2, [&](double x, double, double) { return Vec3{std::cos(k * x), std::sin(k * x), 0}; }, true);
    EhOptions opt;
    opt.stray = StrayMode::omit;
    auto e = energy_Eh(m, ts, h, opt);
    // component differences carry a sinc-type O(delta^2) bias
    EXPECT_NEAR(e.exchange, 1.1 * k * k * pi, 3e-3 * e.exchange);
    // D_1.(d_1 m x m) = -k (2 delta1 d^2) plus off-diagonal entries that vanish
    // against (0, 0, -k)
    EXPECT_NEAR(e.dmi_inplane, -2 * 0.35 * 1.1 * k * pi, 2e-3 * std::abs(e.dmi_inplane));
    EXPECT_NEAR(e.dmi_vertical, 0.0, 1e-10);
}

TEST(ThinFilmEnergy, VerticalTwistExchangeAndDmi) {
    RegimeParams rp;
    auto ts = ThicknessSchedule::standard(rp);
    const double c = 0.5, h = 1e-3;
    auto g = disk(1.0 / 16);
    auto m = sample_vector(
        g, 8, [&](double, double, double z) { return Vec3{std::cos(c * z), std::sin(c * z), 0}; }, true);
    EhOptions opt;
    opt.stray = StrayMode::omit;
    auto e = energy_Eh(m, ts, h, opt);
    EXPECT_NEAR(e.exchange, c * c * pi / (h * h), 2e-3 * e.exchange);
    // D_3 = small (1, 1, 1) against d3 m x m = (0, 0, -c)
    EXPECT_NEAR(e.dmi_vertical, -c * pi / std::sqrt(h), 2e-3 * std::abs(e.dmi_vertical));
}

TEST(ThinFilmEnergy, StrayFieldOfUniformInPlaneField) {
    RegimeParams rp;
    auto ts = ThicknessSchedule::standard(rp);
    auto g = disk();
    auto m = constant(g, 2, {1, 0, 0});
    double h = 1e-3, L = h * std::log(1e3);
    auto e = energy_Eh(m, ts, h);
    double ref = oracle::charge_integral_e1(h) / (4 * pi * h * L);
    EXPECT_NEAR(e.stray, ref, 5e-3 * ref);
    EXPECT_THROW(energy_Eh(m, ts, 0.0), Error);
}

TEST(DmiBounds, HoldOnRandomFieldsAndRejectNonUnit) {
    RegimeParams rp;
    rp.delta1 = 0.7;
    rp.delta2 = -0.4;
    auto ts = ThicknessSchedule::standard(rp);
    auto g = disk(1.0 / 16);
    auto D = ts.at(1e-3).D;
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto m = random_unit_field(g, 4, s, true);
        for (const auto& b : dmi_bounds(m, D, 1e-3)) EXPECT_TRUE(b.holds());
    }
    auto bad = sample_vector(
        g, 2, [](double, double, double) { return Vec3{0.3, 0, 0}; }, false);
    EXPECT_THROW(dmi_bounds(bad, D, 1e-3), Error);
}

TEST(Coercivity, MarginAndConstants) {
    RegimeParams rp;
    rp.beta = 0.5;
    rp.gamma_zeeman = 0.3;
    rp.delta1 = 0.4;
    rp.delta2 = -0.3;
    auto ts = ThicknessSchedule::standard(rp, {0.2, -0.1, 0.5});
    auto g = disk(1.0 / 16);
    double h = 1e-3;
    for (std::uint64_t s = 0; s < 6; ++s) {
        auto m = random_unit_field(g, 4, s, s % 2 == 1);
        EhOptions opt;
        opt.stray = s % 2 == 1 ? StrayMode::omit : StrayMode::fourier;
        auto c = coercivity_margin(m, ts, h, opt);
        EXPECT_TRUE(c.holds());
        EXPECT_NEAR(c.margin, c.energy.total - 0.5 * c.energy.group0(), 1e-12);
        // 4 + 2.5 small entries over d^2 = 6.5 sqrt(h) / alpha
        EXPECT_NEAR(c.o_h, 6.5 * std::sqrt(h), 1e-12);
        double area = g->area();
        EXPECT_NEAR(c.C_gamma, 2 * 0.3 * std::sqrt(0.04 + 0.01 + 0.25) * area, 1e-12);
        EXPECT_NEAR(c.C_dmi, 2 * area * (0.16 + 0.09 + 1) + 1, 1e-12);
    }
    // o_h reaches 1/4 near h = 1/676 for alpha = 1
    auto m = random_unit_field(g, 2, 1, false);
    EXPECT_THROW(coercivity_margin(m, ts, h, {}, 0.01), Error);
    EXPECT_THROW(coercivity_margin(m, ts, h, {}, 1e-4), Error);  // floor below h
}

TEST(ThinFilmEnergy, StrayTermDelegatesToFourierEnergy) {
    RegimeParams rp;
    auto ts = ThicknessSchedule::standard(rp);
    auto m = constant(disk(), 2, {0, 0, 1});
    double h = 1e-3, L = h * std::log(1e3);
    EhOptions opt;
    opt.spectral = SpectralGrid::for_grid(*m.grid);
    auto e = energy_Eh(m, ts, h, opt);
    EXPECT_EQ(e.stray, fourier_stray_energy(m, h, *opt.spectral) / (h * L));
    EXPECT_NEAR(e.exchange, 0.0, 1e-14);
}

TEST(ThinFilmEnergy, TwistExchangeDivergesAsFilmThins) {
    RegimeParams rp;
    auto ts = ThicknessSchedule::standard(rp);
    auto m = sample_vector(
        disk(1.0 / 16), 4, [](double, double, double z) { return Vec3{std::cos(z), std::sin(z), 0}; }, true);
    EhOptions opt;
    opt.stray = StrayMode::omit;
    double e2 = energy_Eh(m, ts, 1e-2, opt).exchange, e3 = energy_Eh(m, ts, 1e-3, opt).exchange;
    EXPECT_GT(e3, 50 * e2);
    EXPECT_GE(e3, 0.9 * pi / 1e-6);  // c = 1, vol = pi
}

// For e1 the film energy is the stray term alone, so its distance to the limit
// is the boundary-charge gap: about 23% at h = 1e-3, which decays like 1/|log h|.
TEST(ThinFilmEnergy, UniformInPlaneFieldApproachesLimitFromAbove) {
    RegimeParams rp;
    auto ts = ThicknessSchedule::standard(rp);
    auto m = constant(disk(1.0 / 64), 2, {1, 0, 0});
    double prev = 1e300;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        auto e = energy_Eh(m, ts, h);
        double L = h * std::abs(std::log(h));
        double ref = oracle::charge_integral_e1(h) / (4 * pi * h * L);
        EXPECT_NEAR(e.total, ref, 3e-3 * ref) << h;
        EXPECT_GT(e.total, 0.5);
        EXPECT_LT(e.total - 0.5, prev);
        prev = e.total - 0.5;
    }
}
