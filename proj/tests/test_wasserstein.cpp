#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "inert/random.hpp"
#include "inert/wasserstein.hpp"

using namespace inert;

namespace {

GridDensity half_normal(double dx = 1e-3, double x_max = 8.0) {
    std::vector<double> w;
    for (double x = 0.0; x <= x_max + 1e-12; x += dx) w.push_back(2.0 * std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI));
    return GridDensity(0.0, dx, std::move(w));
}

EmpiricalMeasure random_measure(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> a(n);
    for (double& x : a) x = z(rng);
    return EmpiricalMeasure(std::move(a));
}

}  // namespace

TEST(WpEmpirical, DiracExamples) {
    EXPECT_DOUBLE_EQ(wp_empirical(EmpiricalMeasure({0.0}), EmpiricalMeasure({1.0})), 1.0);
    EXPECT_DOUBLE_EQ(wp_empirical(EmpiricalMeasure({2.0, 0.0}), EmpiricalMeasure({3.0, 1.0})), 1.0);
    const EmpiricalMeasure a({0.3, -1.0, 2.0});
    EXPECT_EQ(wp_empirical(a, a, 2.0), 0.0);
    EXPECT_THROW(wp_empirical(a, EmpiricalMeasure({1.0})), invalid_input);
    EXPECT_THROW(wp_empirical(a, a, 0.5), invalid_input);
    EXPECT_THROW(EmpiricalMeasure(std::vector<double>{}), invalid_input);
}

TEST(WpEmpirical, MetricAxiomsAndOrderInP) {
    std::mt19937_64 rng(3);
    for (int c = 0; c < 200; ++c) {
        const std::size_t n = 1 + c % 40;
        const auto a = random_measure(rng, n), b = random_measure(rng, n), d = random_measure(rng, n);
        for (double p : {1.0, 2.0}) {
            EXPECT_EQ(wp_empirical(a, b, p), wp_empirical(b, a, p));
            EXPECT_LE(wp_empirical(a, d, p), wp_empirical(a, b, p) + wp_empirical(b, d, p) + 1e-12);
        }
        EXPECT_LE(wp_empirical(a, b, 1.0), wp_empirical(a, b, 2.0) + 1e-12);
    }
}

TEST(WpEmpirical, SortedCouplingBeatsAnyPairing) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int c = 0; c < 200; ++c) {
        const std::size_t n = 2 + c % 30;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = z(rng);
            y[i] = 2.0 * z(rng) + 0.5;
        }
        for (double p : {1.0, 2.0, 3.0})
            EXPECT_LE(wp_empirical(EmpiricalMeasure(x), EmpiricalMeasure(y), p), wp_pairing_cost(x, y, p) + 1e-12);
    }
}

TEST(GridDensity, NormalizesAndValidates) {
    const GridDensity d(0.0, 0.5, {2.0, 2.0, 2.0});
    EXPECT_NEAR(d.trapezoid_mass(), 1.0, 1e-15);
    EXPECT_NEAR(d.mean(), 0.5, 1e-15);
    EXPECT_NEAR(d.quantile(0.25), 0.25, 1e-15);
    EXPECT_THROW(GridDensity(0.0, 0.5, {0.0, 0.0}), invalid_input);
    EXPECT_THROW(GridDensity(0.0, 0.5, {1.0, -1.0, 1.0}), invalid_input);
    EXPECT_THROW(GridDensity(0.0, 0.0, {1.0, 1.0}), invalid_input);
}

TEST(WpVsDensity, PointMassAgainstHalfNormalIsItsMean) {
    const auto d = half_normal();
    EXPECT_NEAR(wp_vs_density(EmpiricalMeasure({0.0}), d, 1.0), std::sqrt(2.0 / M_PI), 1e-5);
    // W2 to a point is the root second moment.
    EXPECT_NEAR(wp_vs_density(EmpiricalMeasure({0.0}), d, 2.0), 1.0, 1e-5);
    // A single midpoint node samples the median instead.
    EXPECT_NEAR(wp_vs_density(EmpiricalMeasure({0.0}), d, 1.0, QuantileRule::midpoint), 0.6744897, 1e-4);
}

TEST(WpVsDensity, QuantileSelfCouplingIsSmall) {
    const double dx = 1e-2;
    const auto d = half_normal(dx);
    for (std::size_t n : {10u, 100u, 1000u}) {
        std::vector<double> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = d.quantile((i + 0.5) / n);
        const EmpiricalMeasure m(a);
        EXPECT_LE(wp_vs_density(m, d, 1.0), dx + 1.0 / n);
        EXPECT_LE(wp_vs_density(m, d, 1.0, QuantileRule::midpoint), 1e-12);
    }
}

TEST(WpVsDensity, TranslationInvariant) {
    const auto d = half_normal(1e-2);
    const EmpiricalMeasure a({0.1, 0.5, 0.7, 1.9});
    for (double p : {1.0, 2.0})
        EXPECT_NEAR(wp_vs_density(a, d, p), wp_vs_density(a.shifted(-3.25), d.shifted(-3.25), p), 1e-9);
}

TEST(WpVsDensity, SampleMeasuresConverge) {
    const auto d = half_normal(1e-3);
    std::vector<double> means;
    for (std::size_t n : {100u, 1000u, 10000u}) {
        double s = 0.0;
        for (std::uint64_t r = 0; r < 10; ++r) {
            std::vector<double> a(n);
            for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(standard_normal(r, Stream::initial, i, 0));
            s += wp_vs_density(EmpiricalMeasure(a), d, 1.0);
        }
        means.push_back(s / 10);
    }
    EXPECT_GT(means[0], means[1]);
    EXPECT_GT(means[1], means[2]);
}
