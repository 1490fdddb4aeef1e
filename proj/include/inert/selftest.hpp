#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "inert/gamma_map.hpp"
#include "inert/particle_sim.hpp"
#include "inert/skorohod.hpp"

namespace inert {

struct CheckResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t violations = 0;
    double seconds = 0.0;
};

struct SelftestReport {
    std::vector<CheckResult> checks;
    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.violations == 0; });
    }
};

namespace detail {

inline std::vector<double> random_walk(std::mt19937_64& rng, std::size_t steps, double start, double scale) {
    std::normal_distribution<double> z(0.0, scale);
    std::vector<double> v(steps + 1);
    v[0] = start;
    for (std::size_t k = 1; k <= steps; ++k) v[k] = v[k - 1] + z(rng);
    return v;
}

inline double close_tol(double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace detail

/// Comparison properties of the one-dimensional Skorohod map on `pairs`
/// random piecewise-linear path pairs: monotonicity, increment ordering,
/// time shift, 1-Lipschitz and idempotence.
inline std::vector<CheckResult> skorohod_suite(std::size_t pairs, std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> len(2, 120);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CheckResult mono{"skorohod.monotone", pairs}, incr{"skorohod.increments", pairs},
        shift{"skorohod.time_shift", pairs}, lip{"skorohod.lipschitz", pairs}, idem{"skorohod.idempotent", pairs};
    const auto t0 = clock::now();
    for (std::size_t c = 0; c < pairs; ++c) {
        const std::size_t N = len(rng);
        const double dt = 0.01 + unit(rng);
        const auto gv = detail::random_walk(rng, N, unit(rng) - 0.5, 0.3 + unit(rng));
        const SampledPath g(0.0, dt, gv);

        // f >= g
        std::vector<double> fv(gv);
        for (double& x : fv) x += std::abs(unit(rng) - 0.3) * 2.0;
        const SampledPath f(0.0, dt, fv);
        const auto rf = reflect_path(f), rg = reflect_path(g);
        bool bad = false;
        for (std::size_t k = 0; k <= N; ++k) bad |= rf.m[k] > rg.m[k] + detail::close_tol(rf.m[k], rg.m[k]);
        mono.violations += bad;

        // ||m_f - m_h|| <= ||f - h|| for an unrelated h
        const SampledPath h(0.0, dt, detail::random_walk(rng, N, unit(rng) - 0.5, 0.5));
        const auto rh = reflect_path(h);
        lip.violations += sup_distance(rg.m, rh.m) > sup_distance(g, h) + 1e-12 * (1.0 + sup_distance(g, h));

        // y1 - y2 nondecreasing, equal starts: m_2 gains at least what m_1 gains
        std::vector<double> y2 = detail::random_walk(rng, N, 0.0, 0.4), y1(y2);
        double lift = 0.0;
        for (std::size_t k = 1; k <= N; ++k) {
            lift += 1e-6 + unit(rng) * 0.2;
            y1[k] += lift;
        }
        std::vector<double> f1(gv), f2(gv);
        for (std::size_t k = 0; k <= N; ++k) {
            f1[k] += y1[k];
            f2[k] += y2[k];
        }
        const auto m1 = reflect_path(SampledPath(0.0, dt, f1)).m, m2 = reflect_path(SampledPath(0.0, dt, f2)).m;
        bad = false;
        for (std::size_t s = 0; s <= N && !bad; ++s)
            for (std::size_t t = s + 1; t <= N; ++t) {
                const double d1 = m1[t] - m1[s], d2 = m2[t] - m2[s];
                if (d2 < d1 - 1e-12 * (1.0 + std::abs(m1[t]) + std::abs(m2[t]))) {
                    bad = true;
                    break;
                }
            }
        incr.violations += bad;

        // restart from x_g(s) at a grid time s
        const std::size_t s = std::uniform_int_distribution<std::size_t>(0, N - 1)(rng);
        std::vector<double> tail(N - s + 1);
        for (std::size_t k = s; k <= N; ++k) tail[k - s] = rg.x[s] + gv[k] - gv[s];
        const auto rt = reflect_path(SampledPath(g.time(s), dt, tail));
        bad = false;
        for (std::size_t k = s; k <= N; ++k)
            bad |= std::abs(rt.x[k - s] - rg.x[k]) > 1e-12 * (1.0 + std::abs(rg.x[k]) + std::abs(rg.m[k]));
        shift.violations += bad;

        // reflecting a nonnegative path does nothing
        const auto again = reflect_path(rg.x);
        bad = false;
        for (std::size_t k = 0; k <= N; ++k) bad |= again.m[k] != 0.0;
        idem.violations += bad;
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    std::vector<CheckResult> out{mono, incr, shift, lip, idem};
    for (auto& r : out) r.seconds = secs;
    return out;
}

/// Structural violations of one simulate() run.
struct InvariantCounts {
    std::size_t v_increase = 0;
    std::size_t y_convexity = 0;
    std::size_t below_barrier = 0;
    std::size_t envelope = 0;
    std::size_t off_contact_push = 0;
    std::size_t total() const { return v_increase + y_convexity + below_barrier + envelope + off_contact_push; }
};

/// V nonincreasing, Y concave, X_i >= Y, m_i grows only on contact (within
/// 3 sqrt(dt)) and sup |V - v0| within velocity_envelope.
inline InvariantCounts check_invariants(const ParticleSystemTrajectory& tr) {
    InvariantCounts c;
    const auto& y = tr.barrier.y;
    const auto& v = tr.barrier.v;
    const std::size_t N = y.steps();
    const double scale = 1.0 + sup_norm(y);
    for (std::size_t k = 1; k <= N; ++k) c.v_increase += v[k] > v[k - 1];
    for (std::size_t k = 1; k < N; ++k) c.y_convexity += (y[k + 1] - 2.0 * y[k] + y[k - 1]) > 1e-12 * scale;
    const double window = 3.0 * std::sqrt(tr.config.dt);
    for (std::size_t i = 0; i < tr.particles.size(); ++i) {
        const auto& x = tr.particles[i];
        const auto& m = tr.m[i];
        for (std::size_t k = 0; k <= N; ++k) {
            c.below_barrier += x[k] < y[k] - 1e-9;
            if (k > 0 && m[k] > m[k - 1]) c.off_contact_push += x[k] - y[k] > window;
        }
    }
    std::vector<SampledPath> f;
    f.reserve(tr.particles.size());
    for (std::size_t i = 0; i < tr.particles.size(); ++i) {
        std::vector<double> fv(N + 1);
        for (std::size_t k = 0; k <= N; ++k) fv[k] = tr.particles[i][k] - tr.m[i][k];
        f.emplace_back(0.0, tr.config.dt, std::move(fv));
    }
    const double env = velocity_envelope(f, tr.config.v0, tr.config.K);
    double dev = 0.0;
    for (std::size_t k = 0; k <= N; ++k) dev = std::max(dev, std::abs(v[k] - tr.config.v0));
    c.envelope += dev > env * (1.0 + 1e-12) + 1e-12;
    return c;
}

/// A random but valid simulation config (n <= 200, at most 400 steps).
inline SimConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SimConfig cfg;
    cfg.n = 1 + std::uniform_int_distribution<std::size_t>(0, 199)(rng);
    const std::size_t steps = 20 + std::uniform_int_distribution<std::size_t>(0, 380)(rng);
    cfg.T = 0.25 + 2.0 * unit(rng);
    cfg.dt = cfg.T / static_cast<double>(steps);
    cfg.T = cfg.dt * static_cast<double>(steps);
    cfg.K = unit(rng) < 0.1 ? 0.0 : 4.0 * unit(rng);
    cfg.v0 = 4.0 * unit(rng) - 2.0;
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: cfg.init = InitialDistribution::delta(unit(rng) < 0.5 ? 0.0 : unit(rng)); break;
        case 1: cfg.init = InitialDistribution::uniform(0.0, 0.1 + unit(rng)); break;
        case 2: cfg.init = InitialDistribution::exponential(0.5 + 3.0 * unit(rng)); break;
        default: cfg.init = InitialDistribution::half_normal(0.1 + unit(rng)); break;
    }
    cfg.seed = rng();
    return cfg;
}

inline CheckResult barrier_invariant_suite(std::size_t configs, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(seed);
    CheckResult r{"barrier.invariants", configs};
    for (std::size_t c = 0; c < configs; ++c) r.violations += check_invariants(simulate(random_config(rng))).total() > 0;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// Full invariant suite run by `inert selftest`.
inline SelftestReport run_selftest(std::uint64_t seed, std::size_t pairs = 1000, std::size_t configs = 50) {
    SelftestReport rep;
    rep.checks = skorohod_suite(pairs, seed);
    rep.checks.push_back(barrier_invariant_suite(configs, derive_seed(seed, 1)));
    return rep;
}

}  // namespace inert
