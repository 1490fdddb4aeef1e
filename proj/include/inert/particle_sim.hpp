#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "inert/gamma_map.hpp"
#include "inert/measure.hpp"
#include "inert/parallel.hpp"
#include "inert/random.hpp"
#include "inert/sampled_path.hpp"

namespace inert {

/// Law of the initial particle positions; always supported in [0, inf).
struct InitialDistribution {
    enum class Kind { delta, uniform, exponential, half_normal, sample_file };

    Kind kind = Kind::delta;
    double a = 0.0;  ///< delta: location; uniform: lower end; exponential: rate; half_normal: scale
    double b = 0.0;  ///< uniform: upper end
    std::string path;

    static InitialDistribution delta(double c) { return checked({Kind::delta, c, 0.0, {}}); }
    static InitialDistribution uniform(double lo, double hi) { return checked({Kind::uniform, lo, hi, {}}); }
    static InitialDistribution exponential(double rate) { return checked({Kind::exponential, rate, 0.0, {}}); }
    static InitialDistribution half_normal(double scale) { return checked({Kind::half_normal, scale, 0.0, {}}); }
    static InitialDistribution sample_file(std::string p) { return checked({Kind::sample_file, 0.0, 0.0, std::move(p)}); }

    void validate() const {
        switch (kind) {
            case Kind::delta:
                if (!(a >= 0.0) || !std::isfinite(a)) throw invalid_input("delta: location must be >= 0");
                break;
            case Kind::uniform:
                if (!(a >= 0.0 && a < b) || !std::isfinite(b))
                    throw invalid_input("uniform: need 0 <= a < b");
                break;
            case Kind::exponential:
                if (!(a > 0.0) || !std::isfinite(a)) throw invalid_input("exponential: rate must be > 0");
                break;
            case Kind::half_normal:
                if (!(a > 0.0) || !std::isfinite(a)) throw invalid_input("half_normal: scale must be > 0");
                break;
            case Kind::sample_file:
                if (path.empty()) throw invalid_input("sample_file: empty path");
                break;
        }
    }

    /// Largest point of the support worth resolving on a grid (99.9999% quantile for unbounded laws).
    double support_extent() const {
        switch (kind) {
            case Kind::delta: return a;
            case Kind::uniform: return b;
            case Kind::exponential: return std::log(1e6) / a;
            case Kind::half_normal: return 5.0 * a;
            case Kind::sample_file: {
                const auto s = read_samples_impl(path);
                return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
            }
        }
        return 0.0;
    }

    static std::vector<double> read_samples_impl(const std::string& file) {
        std::ifstream in(file);
        if (!in) throw invalid_input("cannot open sample file: " + file);
        std::vector<double> out;
        double v;
        while (in >> v) {
            if (!std::isfinite(v) || v < 0.0) throw invalid_input("sample file has a negative or non-finite value");
            out.push_back(v);
        }
        if (!in.eof()) throw invalid_input("sample file is not numeric: " + file);
        return out;
    }

private:
    static InitialDistribution checked(InitialDistribution d) {
        d.validate();
        return d;
    }
};

/// Reads whitespace-separated nonnegative samples.
inline std::vector<double> read_samples(const std::string& path) { return InitialDistribution::read_samples_impl(path); }

/// n i.i.d. draws from `init`; draw i depends only on (seed, i).
/// A sample file supplies its first n values.
inline std::vector<double> sample_initial(const InitialDistribution& init, std::size_t n, std::uint64_t seed) {
    init.validate();
    using K = InitialDistribution::Kind;
    if (init.kind == K::sample_file) {
        auto s = read_samples(init.path);
        if (s.size() < n) throw invalid_input("sample file holds fewer than n samples: " + init.path);
        s.resize(n);
        return s;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (init.kind) {
            case K::delta: out[i] = init.a; break;
            case K::uniform: {
                const auto w = random_block(seed, Stream::initial, i, 0);
                out[i] = init.a + (init.b - init.a) * to_open_unit(w[0]);
                break;
            }
            case K::exponential: {
                const auto w = random_block(seed, Stream::initial, i, 0);
                out[i] = -std::log(to_open_unit(w[0])) / init.a;
                break;
            }
            case K::half_normal:
                out[i] = init.a * std::abs(normal_pair(seed, Stream::initial, i, 0).z0);
                break;
            case K::sample_file: break;
        }
    }
    return out;
}

/// n standard Brownian paths on [0, T] with step dt; path i depends only on (seed, i).
inline std::vector<SampledPath> sample_brownian(std::size_t n, double T, double dt, std::uint64_t seed) {
    const std::size_t steps = grid_steps(T, dt);
    const double sd = std::sqrt(dt);
    std::vector<SampledPath> paths(n);
    parallel_chunks(n, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) {
            std::vector<double> v(steps + 1);
            v[0] = 0.0;
            for (std::size_t k = 0; k < steps; k += 2) {
                const auto p = normal_pair(seed, Stream::brownian, i, k / 2);
                v[k + 1] = v[k] + sd * p.z0;
                if (k + 2 <= steps) v[k + 2] = v[k + 1] + sd * p.z1;
            }
            paths[i] = SampledPath(0.0, dt, std::move(v));
        }
    }, 64);
    return paths;
}

struct SimConfig {
    std::size_t n = 1;
    double T = 1.0;
    double dt = 1e-3;
    double K = 0.0;
    double v0 = 0.0;
    InitialDistribution init = InitialDistribution::delta(0.0);
    std::uint64_t seed = 0;

    std::size_t steps() const { return grid_steps(T, dt); }

    void validate() const {
        if (n == 0) throw invalid_input("SimConfig: n must be >= 1");
        if (!(K >= 0.0) || !std::isfinite(K)) throw invalid_input("SimConfig: K must be >= 0");
        if (!std::isfinite(v0)) throw invalid_input("SimConfig: v0 must be finite");
        (void)steps();
        init.validate();
    }
};

struct ParticleSystemTrajectory {
    SimConfig config;
    std::vector<SampledPath> particles;  ///< X_i = X_i(0) + B_i + m_i
    BarrierTrajectory barrier;
    std::vector<SampledPath> m;
};

/// Runs the finite-n system: Brownian drivers plus initial positions through
/// the n-particle Skorohod map at eps = dt. Stores every path.
inline ParticleSystemTrajectory simulate(const SimConfig& cfg) {
    cfg.validate();
    auto B = sample_brownian(cfg.n, cfg.T, cfg.dt, cfg.seed);
    const auto xi = sample_initial(cfg.init, cfg.n, cfg.seed);
    std::vector<SampledPath> f;
    f.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        std::vector<double> v(B[i].data());
        for (double& x : v) x = xi[i] + x;
        f.emplace_back(0.0, cfg.dt, std::move(v));
    }
    B.clear();
    auto g = solve_gamma(f, cfg.v0, cfg.K, cfg.dt);
    return {cfg, std::move(g.x), std::move(g.barrier), std::move(g.m)};
}

/// Grid index of time t on a grid starting at 0 with step dt; throws when off-grid.
inline std::size_t grid_index(double t, double dt, std::size_t steps) {
    const double r = t / dt;
    const double k = std::round(r);
    if (k < 0.0 || k > static_cast<double>(steps) || std::abs(r - k) > 1e-9 * std::max(1.0, r))
        throw invalid_input("time is not on the simulation grid");
    return static_cast<std::size_t>(k);
}

/// Empirical measure of the particle positions at grid time t.
inline EmpiricalMeasure snapshot(const ParticleSystemTrajectory& traj, double t) {
    const std::size_t k = grid_index(t, traj.config.dt, traj.barrier.y.steps());
    std::vector<double> a(traj.particles.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = traj.particles[i][k];
    return EmpiricalMeasure(std::move(a));
}

/// Result of a memory-light run: full barrier, requested snapshots, final state.
struct StreamedRun {
    SimConfig config;
    BarrierTrajectory barrier;
    std::vector<std::pair<std::size_t, EmpiricalMeasure>> snapshots;  ///< (step, measure)
    std::vector<double> initial;   ///< X_i(0)
    std::vector<double> final_x;   ///< X_i(T) in particle order
    std::vector<double> final_m;   ///< m_i(T)
    std::vector<std::vector<double>> tracked;  ///< X_i(k) for the first `track` particles
};

/// Same system as simulate(), bit for bit, but time-major with O(n) memory:
/// Brownian increments are regenerated from the counter-based stream.
inline StreamedRun simulate_streaming(const SimConfig& cfg, const std::set<std::size_t>& snapshot_steps = {},
                                      std::size_t track = 0) {
    cfg.validate();
    const std::size_t n = cfg.n;
    const std::size_t steps = cfg.steps();
    const double sd = std::sqrt(cfg.dt);

    StreamedRun run;
    run.config = cfg;
    run.initial = sample_initial(cfg.init, n, cfg.seed);
    std::vector<double> bm(n, 0.0), f(run.initial), spare(n, 0.0);
    BarrierStepper stepper(f, cfg.v0, cfg.K, cfg.dt, 1);

    auto take_snapshot = [&](std::size_t k) {
        std::vector<double> a(n);
        const auto m = stepper.regulators();
        for (std::size_t i = 0; i < n; ++i) a[i] = f[i] + m[i];
        run.snapshots.emplace_back(k, EmpiricalMeasure(std::move(a)));
    };

    track = std::min(track, n);
    run.tracked.assign(track, std::vector<double>(steps + 1));
    auto record = [&](std::size_t k) {
        const auto m = stepper.regulators();
        for (std::size_t i = 0; i < track; ++i) run.tracked[i][k] = f[i] + m[i];
    };

    std::vector<double> y(steps + 1, 0.0), v(steps + 1, 0.0);
    v[0] = stepper.v();
    record(0);
    if (snapshot_steps.count(0)) take_snapshot(0);
    for (std::size_t k = 0; k < steps; ++k) {
        const bool even = (k % 2 == 0);
        stepper.advance([&](std::size_t i) {
            double z;
            if (even) {
                const auto p = normal_pair(cfg.seed, Stream::brownian, i, k / 2);
                z = p.z0;
                spare[i] = p.z1;
            } else {
                z = spare[i];
            }
            bm[i] = bm[i] + sd * z;
            f[i] = run.initial[i] + bm[i];
            return f[i];
        });
        y[k + 1] = stepper.y();
        v[k + 1] = stepper.v();
        record(k + 1);
        if (snapshot_steps.count(k + 1)) take_snapshot(k + 1);
    }

    run.barrier.impulse_K = cfg.K;
    run.barrier.v0 = cfg.v0;
    run.barrier.y = SampledPath(0.0, cfg.dt, std::move(y));
    run.barrier.v = SampledPath(0.0, cfg.dt, std::move(v));
    const auto m = stepper.regulators();
    run.final_m.assign(m.begin(), m.end());
    run.final_x.resize(n);
    for (std::size_t i = 0; i < n; ++i) run.final_x[i] = f[i] + m[i];
    return run;
}

}  // namespace inert
