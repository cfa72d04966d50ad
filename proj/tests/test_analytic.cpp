#include <gtest/gtest.h>

#include "oracles.hpp"
#include "thinfilm/analytic.hpp"

using namespace thinfilm;

TEST(Gh, MatchesIntegralRepresentation) {
    for (double h : {1e-4, 1e-2, 0.3})
        for (double k : {1e-3, 0.5, 10.0, 1e3}) EXPECT_NEAR(gh(h, k), oracle::gh(h, k), 1e-13 * oracle::gh(h, k));
}

TEST(Gh, WorkedValues) {
    EXPECT_EQ(gh(0.2, 0.0), 1.0);
    EXPECT_NEAR(gh(0.1, 1.0 / (2 * pi * 0.1)), 1.0 - std::exp(-1.0), 1e-15);
    // 2 pi h k = 2: (1 - e^-2)/2
    EXPECT_NEAR(gh(1.0, 1.0 / pi), (1.0 - std::exp(-2.0)) / 2, 1e-15);
}

TEST(Gh, OneMinusIsAccurateForSmallArguments) {
    for (double x : {1e-9, 1e-6, 1e-4, 2e-3, 0.5}) {
        double h = 1e-3, k = x / (2 * pi * h);
        // alternating series sum_{n>=1} (-x)^(n-1) x / (n+1)!
        long double X = x, term = X / 2, ref = 0;
        for (int n = 1; n < 40; ++n) {
            ref += term;
            term *= -X / (n + 2);
        }
        EXPECT_NEAR(one_minus_gh(h, k), static_cast<double>(ref), 1e-12 * static_cast<double>(ref)) << x;
    }
}

TEST(Gh, BoundsAndErrors) {
    for (double h : {1e-6, 1e-2, 1.0})
        for (double k : {0.0, 1e-2, 1.0, 1e6}) {
            double g = gh(h, k);
            EXPECT_GT(g, 0.0);
            EXPECT_LE(g, 1.0);
        }
    EXPECT_THROW(gh(0.0, 1.0), Error);
    EXPECT_THROW(gh(-1.0, 1.0), Error);
    EXPECT_THROW(gh(1.0, -1.0), Error);
}

TEST(BenjaminOno, EndpointsAreTheExplicitProfiles) {
    BOParam<double> one(1.0), two(2.0);
    for (double x1 : {-3.0, 0.0, 2.5})
        for (double x2 : {0.0, 1.0}) {
            EXPECT_NEAR(bo_eval(one, x1, x2), 1.0, 1e-15);
            EXPECT_NEAR(bo_eval(two, x1, x2), 2 * (1 + x2) / (x1 * x1 + (1 + x2) * (1 + x2)), 1e-15);
        }
    EXPECT_EQ(bo_eval(BOKind::zero, 1.5, 1.0, 1.0), 0.0);
    EXPECT_THROW(BOParam<double>(0.9), Error);
    EXPECT_THROW(BOParam<double>(2.1), Error);
    EXPECT_THROW(bo_eval(one, 0.0, -1.0), Error);
}

TEST(BenjaminOno, HarmonicAndDerivativesMatchFiniteDifferences) {
    for (double a : {1.2, 1.5, 1.9, 2.0}) {
        BOParam<double> p(a);
        auto u = [&](double x, double y) { return bo_eval(p, x, y); };
        for (double x1 : {-1.3, 0.2, 2.9})
            for (double x2 : {0.4, 1.7}) {
                EXPECT_NEAR(oracle::laplacian(u, x1, x2, 1e-3), 0.0, 1e-4);
                auto v = bo_eval_full(p, x1, x2);
                double s = 1e-6;
                EXPECT_NEAR(v.du1, (u(x1 + s, x2) - u(x1 - s, x2)) / (2 * s), 1e-7);
                EXPECT_NEAR(v.du2, (u(x1, x2 + s) - u(x1, x2 - s)) / (2 * s), 1e-7);
            }
    }
}

TEST(BenjaminOno, PeriodIntegralIsTwoPi) {
    for (double a : {1.1, 1.5, 1.9}) {
        BOParam<double> p(a);
        for (double x2 : {0.0, 0.7, 3.0}) {
            double I = oracle::gk([&](double x) { return bo_eval(p, x, x2); }, -0.3, -0.3 + p.period());
            EXPECT_NEAR(I, 2 * pi, 1e-10) << a << " " << x2;
        }
    }
}

namespace {
std::vector<PNSolution<double>> suite(double lam) {
    return {PNSolution<double>::constant(1, lam), PNSolution<double>::constant(-2, lam),
            PNSolution<double>::nonperiodic(0, 1, 0.3, lam), PNSolution<double>::nonperiodic(2, -1, -1.0, lam),
            PNSolution<double>::periodic(0, 1, 1.3, 0.0, lam), PNSolution<double>::periodic(1, -1, 1.8, 0.4, lam)};
}
}  // namespace

TEST(PeierlsNabarro, HarmonicInTheHalfPlane) {
    for (double lam : {-0.5, 0.0, 0.5})
        for (const auto& s : suite(lam)) {
            auto f = [&](double x, double y) { return pn_eval(s, x, y); };
            for (double x1 : {-2.1, 0.3, 4.0})
                for (double x2 : {0.5, 2.0}) EXPECT_NEAR(oracle::laplacian(f, x1, x2, 1e-3), 0.0, 2e-4);
        }
}

TEST(PeierlsNabarro, BoundaryEquationFromOneSidedDifferences) {
    for (double lam : {-0.5, 0.0, 0.5})
        for (const auto& s : suite(lam)) {
            auto f = [&](double x, double y) { return pn_eval(s, x, y); };
            for (int i = 0; i < 41; ++i) {
                double x1 = -10.0 + 0.5 * i + 0.013;
                double res = oracle::dy_at_zero(f, x1) - lam + std::sin(f(x1, 0.0));
                EXPECT_NEAR(res, 0.0, 1e-8) << to_string(s.kind) << " x1=" << x1;
                EXPECT_NEAR(pn_boundary_residual(s, x1), 0.0, 1e-12);
            }
        }
}

TEST(PeierlsNabarro, WorkedValuesAndErrors) {
    // n = 0, sign +, a = 0: f(1, 0) = 2 arctan(1)
    EXPECT_NEAR(pn_eval(PNSolution<double>::nonperiodic(0, 1, 0.0, 0.0), 1.0, 0.0), pi / 2, 1e-15);
    EXPECT_NEAR(pn_eval(PNSolution<double>::constant(3, 0.25), 5.0, 2.0), 3 * pi + 0.5, 1e-15);
    auto p = PNSolution<double>::periodic(0, 1, 1.5, 0.2, 0.0);
    for (double x : {-1.0, 0.3, 2.0}) EXPECT_NEAR(pn_eval(p, x + p.period(), 0.4), pn_eval(p, x, 0.4), 1e-12);
    EXPECT_THROW(PNSolution<double>::nonperiodic(0, 0, 0.0, 0.0), Error);
    EXPECT_THROW(PNSolution<double>::periodic(0, 1, 1.0, 0.0, 0.0), Error);
    EXPECT_THROW(PNSolution<double>::periodic(0, 1, 2.0, 0.0, 0.0), Error);
    EXPECT_THROW(pn_eval(p, 0.0, -0.1), Error);
}

TEST(PeierlsNabarro, SmoothAcrossTangentPoles) {
    // the bracket form must stay continuous where tan(sigma x1) blows up
    auto p = PNSolution<double>::periodic(0, 1, 1.5, 0.0, 0.0);
    double pole = pi / (2 * BOParam<double>(1.5).sigma);
    EXPECT_NEAR(pn_eval(p, pole - 1e-9, 0.3), pn_eval(p, pole + 1e-9, 0.3), 1e-7);
}

TEST(ExplicitIntegral, ClosedFormMatchesQuadrature) {
    for (double a : {1.2, 1.5, 1.9}) {
        BOParam<double> p(a);
        double x0 = pi / (4 * p.sigma);
        for (double x1 : {-3.0, 0.4, 1.1, 5.0})
            for (double x2 : {0.0, 0.8}) {
                auto f = [&](double s) { return bo_eval(p, 2 * x0 - s, x2) - bo_eval(p, s, x2); };
                EXPECT_NEAR(oracle::gk(f, 0.0, x1), explicit_integral_closed_form(p, x1, x2), 1e-10);
            }
    }
}

TEST(Vortex, SolvesTheBoundaryProblem) {
    for (double eps : {0.25, 0.5, 2.0})
        for (double a : {-1.0, 0.0, 0.7})
            for (double d2 : {-0.2, 0.0, 0.1}) {
                VortexProfile<double> v{eps, a, d2};
                auto f = [&](double x, double y) { return vortex_phi(v, x, y); };
                for (double x1 : {-4.0, -0.1, 0.0, 3.3}) {
                    double d2phi = oracle::dy_at_zero(f, x1, 1e-3 * eps);
                    EXPECT_NEAR(d2phi - std::sin(2 * f(x1, 0.0)) / (2 * eps) - d2, 0.0, 1e-7);
                    EXPECT_NEAR(oracle::laplacian(f, x1, 1.0, 1e-3), 0.0, 1e-4);
                }
            }
}

TEST(Vortex, RescalesOntoTheNonperiodicFamily) {
    VortexProfile<double> v{0.5, 0.3, 0.1};
    auto s = pn_from_vortex(v);
    EXPECT_EQ(s.kind, PNKind::nonperiodic);
    EXPECT_EQ(s.n, 1);
    EXPECT_EQ(s.sign, -1);
    EXPECT_NEAR(s.lambda, 2 * 0.5 * 0.1, 1e-15);
    EXPECT_LE(vortex_rescaling_gap(v, s), 1e-10);
}

TEST(Vortex, LayerCheckFlagsShortSampleRanges) {
    VortexProfile<double> v{0.5, 0.0, 0.1};
    std::vector<double> wide, narrow;
    for (int i = 0; i <= 400; ++i) {
        wide.push_back(-50.0 + 0.25 * i);
        narrow.push_back(-5.0 + 0.025 * i);
    }
    EXPECT_TRUE(layer_check(v, wide).pass);
    EXPECT_FALSE(layer_check(v, narrow).pass);
    EXPECT_FALSE(layer_check(v, {}).pass);
    EXPECT_THROW(vortex_phi(VortexProfile<double>{0.0, 0.0, 0.0}, 0.0, 0.0), Error);
}
