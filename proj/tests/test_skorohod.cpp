#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "inert/selftest.hpp"
#include "inert/skorohod.hpp"

using namespace inert;

namespace {

void expect_values(const SampledPath& p, std::vector<double> want, double tol = 1e-15) {
    ASSERT_EQ(p.size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(p[k], want[k], tol) << "k = " << k;
}

}  // namespace

TEST(ReflectPath, RunningSupExample) {
    const auto r = reflect_path(SampledPath(0.0, 1.0, {0.0, -0.5, 0.2, -1.0}));
    expect_values(r.m, {0.0, 0.5, 0.5, 1.0});
    expect_values(r.x, {0.0, 0.0, 0.7, 0.0});
}

TEST(ReflectPath, PositivePathUntouched) {
    const auto r = reflect_path(SampledPath(0.0, 1.0, {1.0, 2.0, 3.0}));
    expect_values(r.m, {0.0, 0.0, 0.0});
    expect_values(r.x, {1.0, 2.0, 3.0});
}

TEST(ReflectPath, DescendingLine) {
    const auto f = SampledPath::from_function(0.0, 0.25, 4, [](double t) { return -t; });
    const auto r = reflect_path(f);
    expect_values(r.m, {0.0, 0.25, 0.5, 0.75, 1.0});
    expect_values(r.x, {0.0, 0.0, 0.0, 0.0, 0.0});
}

TEST(ReflectPath, NegativeStartIsRegulated) {
    const auto r = reflect_path(SampledPath(0.0, 1.0, {-2.0, 1.0, -3.0}));
    expect_values(r.m, {2.0, 2.0, 3.0});
    EXPECT_TRUE(is_flat_off_contact(r));
}

TEST(ReflectAgainstBarrier, ZeroBarrierMatchesPlainMap) {
    const SampledPath f(0.0, 0.1, {0.3, -0.2, 0.5, -0.7, 0.1});
    const auto a = reflect_path(f);
    const auto b = reflect_against_barrier(f, SampledPath::constant(0.0, 0.1, 4, 0.0));
    expect_values(b.m, std::vector<double>(a.m.data()));
    expect_values(b.x, std::vector<double>(a.x.data()));
}

TEST(ReflectAgainstBarrier, CarriedByRisingBarrier) {
    const auto y = SampledPath::from_function(0.0, 0.2, 5, [](double t) { return t; });
    const auto r = reflect_against_barrier(SampledPath::constant(0.0, 0.2, 5, 0.0), y);
    for (std::size_t k = 0; k < y.size(); ++k) {
        EXPECT_NEAR(r.m[k], y[k], 1e-15);
        EXPECT_NEAR(r.x[k], y[k], 1e-15);
    }
    EXPECT_TRUE(is_flat_off_contact(r, &y));
}

TEST(ReflectAgainstBarrier, EscapesFallingBarrier) {
    const auto f = SampledPath::from_function(0.0, 0.2, 5, [](double t) { return t; });
    const auto y = SampledPath::from_function(0.0, 0.2, 5, [](double t) { return -t; });
    const auto r = reflect_against_barrier(f, y);
    expect_values(r.m, std::vector<double>(6, 0.0));
    expect_values(r.x, std::vector<double>(f.data()));
}

TEST(ReflectAgainstBarrier, GridMismatchRejected) {
    EXPECT_THROW(reflect_against_barrier(SampledPath::constant(0.0, 0.1, 4, 0.0), SampledPath::constant(0.0, 0.1, 5, 0.0)),
                 invalid_input);
}

TEST(ReflectPath, RandomPathInvariants) {
    std::mt19937_64 rng(11);
    for (int c = 0; c < 200; ++c) {
        const SampledPath f(0.0, 0.01, detail::random_walk(rng, 300, 0.2, 0.1));
        const auto r = reflect_path(f);
        EXPECT_DOUBLE_EQ(r.m[0], std::max(-f[0], 0.0));
        for (std::size_t k = 0; k < f.size(); ++k) {
            EXPECT_GE(r.x[k], -1e-12);
            if (k > 0) {
                EXPECT_GE(r.m[k], r.m[k - 1]);
            }
        }
        EXPECT_TRUE(is_flat_off_contact(r));
    }
}

TEST(SkorohodSuite, AllComparisonPropertiesHold) {
    for (const auto& c : skorohod_suite(300, 5)) {
        EXPECT_EQ(c.violations, 0u) << c.name;
        EXPECT_EQ(c.cases, 300u);
    }
}

TEST(SkorohodSuite, IncrementOrderingIsNotSymmetric) {
    // f1 - f2 is nondecreasing, so m2 must gain at least what m1 gains, and here strictly more.
    const SampledPath f1(0.0, 1.0, {0.0, 1.0, 2.0, -1.0});
    const SampledPath f2(0.0, 1.0, {0.0, -1.0, -2.0, -5.0});
    const auto m1 = reflect_path(f1).m, m2 = reflect_path(f2).m;
    EXPECT_GT(m2[3] - m2[0], m1[3] - m1[0]);
}
