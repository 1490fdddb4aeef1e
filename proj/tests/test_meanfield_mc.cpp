#include <cmath>

#include <gtest/gtest.h>

#include "inert/meanfield_mc.hpp"
#include "inert/meanfield_pde.hpp"

using namespace inert;

namespace {

LimitMcParams params(double K, double v0, std::size_t M, double dt, double T = 1.0) {
    LimitMcParams p;
    p.K = K;
    p.v0 = v0;
    p.M = M;
    p.dt = dt;
    p.T = T;
    p.seed = 19;
    return p;
}

}  // namespace

TEST(SolveLimitMc, NoCouplingIsOneSweep) {
    const auto b = solve_limit_mc(InitialDistribution::delta(0.0), params(0.0, 0.75, 2000, 0.01));
    EXPECT_EQ(b.iterations, 1u);
    for (std::size_t k = 0; k < b.y.size(); ++k) {
        EXPECT_NEAR(b.y[k], 0.75 * b.y.time(k), 1e-14);
        EXPECT_EQ(b.v[k], 0.75);
    }
}

TEST(SolveLimitMc, FarAwayParticlesNeverPush) {
    const auto b = solve_limit_mc(InitialDistribution::delta(10.0), params(1.0, 0.0, 10000, 1e-2));
    EXPECT_LE(sup_norm(b.y), 1e-8);
}

TEST(SolveLimitMc, ExpectedRegulatorMatchesReflectedMean) {
    // K = 0, v0 = 0: E m(t) = E sup_{s<=t} (-B_s) = sqrt(2t/pi).
    const auto p = params(0.0, 0.0, 100000, 1e-2);
    const auto b = solve_limit_mc(InitialDistribution::delta(0.0), p);
    const double se = std::sqrt(1.0 - 2.0 / M_PI) / std::sqrt(1e5);
    EXPECT_NEAR(b.expected_m.back(), std::sqrt(2.0 / M_PI), 4.0 * se);
    EXPECT_NEAR(b.expected_m[25], std::sqrt(2.0 * 0.25 / M_PI), 4.0 * se);

    auto g = p;
    g.monitoring = Monitoring::grid;
    const auto bg = solve_limit_mc(InitialDistribution::delta(0.0), g);
    // Grid monitoring misses the excursions between samples: bias about 0.5826 sqrt(dt).
    EXPECT_NEAR(b.expected_m.back() - bg.expected_m.back(), 0.5826 * std::sqrt(1e-2), 0.02);
}

TEST(SolveLimitMc, DeterministicForSeed) {
    const auto p = params(1.0, 0.2, 3000, 1e-2);
    const auto a = solve_limit_mc(InitialDistribution::exponential(2.0), p);
    const auto b = solve_limit_mc(InitialDistribution::exponential(2.0), p);
    EXPECT_EQ(a.y.data(), b.y.data());
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveLimitMc, TwoStartsAgreeAcrossRenewalWindows) {
    auto p = params(1.0, 0.0, 5000, 1e-2, 2.0);
    p.tol = 1e-4;
    const auto a = solve_limit_mc(InitialDistribution::delta(0.0), p);
    p.initial_guess = [](double t) { return -t * t; };
    const auto b = solve_limit_mc(InitialDistribution::delta(0.0), p);
    EXPECT_GE(a.windows, 2u);
    EXPECT_LE(sup_distance(a.y, b.y), 2.0 * p.tol);
}

TEST(SolveLimitMc, BarrierIsConcave) {
    const auto b = solve_limit_mc(InitialDistribution::uniform(0.0, 0.5), params(2.0, 0.5, 5000, 1e-2));
    for (std::size_t k = 1; k + 1 < b.y.size(); ++k) EXPECT_LE(b.y[k + 1] - 2 * b.y[k] + b.y[k - 1], 1e-12);
    for (std::size_t k = 1; k < b.v.size(); ++k) EXPECT_LE(b.v[k], b.v[k - 1]);
}

TEST(SolveLimitMc, ReportsNonConvergence) {
    auto p = params(1.0, 0.0, 2000, 1e-2);
    p.max_iter = 1;
    p.tol = 1e-12;
    try {
        solve_limit_mc(InitialDistribution::delta(0.0), p);
        FAIL() << "expected convergence_error";
    } catch (const convergence_error& e) {
        EXPECT_GT(e.residual(), 1e-12);
    }
}

TEST(SolveLimitMc, RejectsBadParameters) {
    auto p = params(-1.0, 0.0, 100, 1e-2);
    EXPECT_THROW(solve_limit_mc(InitialDistribution::delta(0.0), p), invalid_input);
    p = params(1.0, 0.0, 0, 1e-2);
    EXPECT_THROW(solve_limit_mc(InitialDistribution::delta(0.0), p), invalid_input);
    p = params(1.0, 0.0, 100, 0.3);
    EXPECT_THROW(solve_limit_mc(InitialDistribution::delta(0.0), p), invalid_input);
}

TEST(SolveLimitMc, RegulatorGrowthMatchesBoundaryDensity) {
    // E m(t) = (1/2) int_0^t u(s, 0) ds links the two solvers.
    const auto pde = solve_limit_pde(PdeInitial{PointMass{0.0}}, PdeParams{0.0, 1.0, 1.0, 2.5e-5, 5e-3, 0.0, 10});
    const auto mc = solve_limit_mc(InitialDistribution::delta(0.0), params(1.0, 0.0, 50000, 1e-3));
    for (double t : {0.25, 0.5, 1.0}) {
        const double from_pde = (pde.v0 - pde.yprime.at(t)) / pde.K;  // (1/2) int u(s, 0) ds
        EXPECT_NEAR(mc.expected_m.at(t), from_pde, 0.01) << "t = " << t;
    }
}
