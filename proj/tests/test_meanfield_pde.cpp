#include <cmath>

#include <gtest/gtest.h>

#include "inert/meanfield_pde.hpp"
#include "inert/particle_sim.hpp"
#include "inert/wasserstein.hpp"

using namespace inert;

namespace {

double image_kernel(double t, double x, double x0) {
    const auto phi = [t](double z) { return std::exp(-z * z / (2 * t)) / std::sqrt(2 * M_PI * t); };
    return phi(x - x0) + phi(x + x0);
}

void expect_mass_and_sign(const DensityField& f, double tol) {
    EXPECT_LE(f.max_mass_error, tol);
    for (const auto& row : f.u)
        for (double v : row) EXPECT_GE(v, -1e-12);
}

}  // namespace

TEST(SolveLimitPde, FixedWallMatchesImageKernel) {
    const auto f = solve_limit_pde(PdeInitial{PointMass{1.0}}, PdeParams{0.0, 0.0, 1.0, 2.5e-5, 5e-3, 0.0, 50});
    EXPECT_NEAR((1.0 + std::exp(-2.0)) / std::sqrt(2.0 * M_PI), 0.45293, 1e-5);
    const auto& u = f.u.back();
    for (std::size_t j = 0; j < 1000; j += 50) EXPECT_NEAR(u[j], image_kernel(1.0, j * f.dx, 1.0), 1e-3);
    EXPECT_NEAR(u[200], 0.45293, 1e-3);
    expect_mass_and_sign(f, 1e-4);
}

TEST(SolveLimitPde, NoCouplingLeavesBarrierAtRest) {
    const auto f = solve_limit_pde(PdeInitial{PointMass{0.0}}, PdeParams{0.0, 0.0, 0.5, 1e-4, 1e-2, 0.0, 10});
    for (std::size_t k = 0; k < f.y.size(); ++k) {
        EXPECT_EQ(f.y[k], 0.0);
        EXPECT_EQ(f.yprime[k], 0.0);
    }
}

TEST(SolveLimitPde, MassConservedAndBarrierConcave) {
    const PdeInitial inits[] = {PointMass{0.0}, PointMass{0.3},
                                pde_initial(InitialDistribution::exponential(2.0), 1e-2, 12.0)};
    for (const auto& init : inits)
        for (double v0 : {-1.0, 0.0, 1.0}) {
            const auto f = solve_limit_pde(init, PdeParams{v0, 2.0, 1.0, 1e-4, 1e-2, 12.0, 20});
            expect_mass_and_sign(f, 1e-4);
            EXPECT_EQ(f.yprime[0], v0);
            EXPECT_EQ(f.y[0], 0.0);
            for (std::size_t k = 1; k + 1 < f.y.size(); ++k)
                EXPECT_LE(f.y[k + 1] - 2 * f.y[k] + f.y[k - 1], 1e-12) << "k = " << k;
        }
}

TEST(SolveLimitPde, GridDensityOverload) {
    const auto d = std::get<GridDensity>(pde_initial(InitialDistribution::uniform(0.0, 1.0), 1e-2, 8.0));
    const auto f = solve_limit_pde(d, 0.5, 1.0, 1.0, 1e-4, 1e-2, 8.0);
    expect_mass_and_sign(f, 1e-4);
    EXPECT_LT(f.yprime.back(), 0.5);
}

TEST(SolveLimitPde, RejectsBadGrids) {
    EXPECT_THROW(solve_limit_pde(PdeInitial{PointMass{0.0}}, PdeParams{0.0, 1.0, 1.0, 1e-3, 1e-2, 0.0, 10}), invalid_input);
    EXPECT_THROW(solve_limit_pde(PdeInitial{PointMass{0.0}}, PdeParams{0.0, -1.0, 1.0, 1e-4, 1e-2, 0.0, 10}), invalid_input);
    EXPECT_THROW(solve_limit_pde(PdeInitial{PointMass{5.0}}, PdeParams{0.0, 1.0, 1.0, 1e-4, 1e-2, 4.0, 10}), invalid_input);
}

TEST(SolveLimitPde, TightDomainReportsMassDrift) {
    EXPECT_THROW(solve_limit_pde(PdeInitial{PointMass{0.0}}, PdeParams{0.0, 0.0, 1.0, 1e-4, 1e-2, 1.0, 10}),
                 mass_drift_error);
}

TEST(DensityFixedBarrier, StillBarrierEqualsUncoupledSolve) {
    const auto g = SampledPath::constant(0.0, 1e-4, 5000, 0.0);
    const auto a = density_fixed_barrier(g, PdeInitial{PointMass{0.5}}, 0.5, 1e-4, 1e-2, 6.0);
    const auto b = solve_limit_pde(PdeInitial{PointMass{0.5}}, PdeParams{0.0, 0.0, 0.5, 1e-4, 1e-2, 6.0, 200});
    ASSERT_EQ(a.u.back().size(), b.u.back().size());
    for (std::size_t j = 0; j < a.u.back().size(); ++j) EXPECT_NEAR(a.u.back()[j], b.u.back()[j], 1e-12);
    expect_mass_and_sign(a, 1e-4);
}

TEST(DensityFixedBarrier, MatchesReflectedParticles) {
    const double slope = 0.5, T = 0.5, dt = 2.5e-4;
    const auto g = SampledPath::from_function(0.0, 2.5e-5, 20000, [&](double t) { return slope * t; });
    const auto f = density_fixed_barrier(g, PdeInitial{PointMass{0.0}}, T, 2.5e-5, 5e-3);
    expect_mass_and_sign(f, 1e-4);
    SimConfig cfg;
    cfg.n = 100000;
    cfg.T = T;
    cfg.dt = dt;
    cfg.K = 0.0;
    cfg.v0 = slope;
    cfg.seed = 404;
    const auto run = simulate_streaming(cfg);
    EXPECT_LE(wp_vs_density(EmpiricalMeasure(run.final_x), f.final_density(), 1.0), 0.02);
}

TEST(DensityFixedBarrier, RejectsBadBarrier) {
    const auto g = SampledPath::constant(0.0, 1e-4, 100, 0.1);
    EXPECT_THROW(density_fixed_barrier(g, PdeInitial{PointMass{0.0}}, 0.01, 1e-4, 1e-2), invalid_input);
    const auto h = SampledPath::constant(0.0, 1e-4, 100, 0.0);
    EXPECT_THROW(density_fixed_barrier(h, PdeInitial{PointMass{0.0}}, 0.02, 1e-4, 1e-2), invalid_input);
}

TEST(ConsistencyCheck, NoCouplingHasZeroResidual) {
    const auto f = solve_limit_pde(PdeInitial{PointMass{0.0}}, PdeParams{0.3, 0.0, 0.5, 1e-4, 1e-2, 0.0, 10});
    EXPECT_EQ(consistency_check(f).max_residual, 0.0);
}

TEST(ConsistencyCheck, ResidualScalesWithGrid) {
    struct Grid {
        double dt, dx;
    };
    double worst = 0.0;
    for (const Grid g : {Grid{4e-4, 2e-2}, Grid{1e-4, 1e-2}, Grid{2.5e-5, 5e-3}}) {
        const auto f = solve_limit_pde(PdeInitial{PointMass{0.0}}, PdeParams{0.0, 1.0, 1.0, g.dt, g.dx, 0.0, 10});
        const auto r = consistency_check(f);
        EXPECT_TRUE(r.free_boundary);
        worst = std::max(worst, r.max_residual / r.scale);
    }
    EXPECT_LE(worst, kConsistencyFactor);
    std::cout << "measured consistency constant C = " << worst << '\n';
}

TEST(ConsistencyCheck, PrescribedBarrierIsFlagged) {
    const auto g = SampledPath::constant(0.0, 1e-4, 10000, 0.0);
    const auto f = density_fixed_barrier(g, PdeInitial{PointMass{0.0}}, 1.0, 1e-4, 1e-2, 0.0, 1.0);
    const auto r = consistency_check(f);
    EXPECT_FALSE(r.free_boundary);
    EXPECT_GT(r.max_residual, r.threshold);
}
