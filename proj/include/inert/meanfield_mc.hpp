#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "inert/error.hpp"
#include "inert/parallel.hpp"
#include "inert/particle_sim.hpp"
#include "inert/random.hpp"
#include "inert/sampled_path.hpp"

namespace inert {

/// How the running sup of a sampled path against the barrier is taken.
enum class Monitoring {
    grid,    ///< sup over grid points only (biased low by O(sqrt(dt)))
    bridge,  ///< exact sup of the Brownian bridge between grid points
};

struct LimitMcParams {
    double v0 = 0.0;
    double K = 0.0;
    double T = 1.0;
    double dt = 1e-3;
    std::size_t M = 10000;
    std::uint64_t seed = 0;
    double tol = 1e-4;
    std::size_t max_iter = 100;
    Monitoring monitoring = Monitoring::bridge;
    /// First Picard iterate; defaults to y(t) = v0 t.
    std::function<double(double)> initial_guess;
    /// Renewal window length; <= 0 selects min(T, 0.9 sqrt(2/K)).
    double window = 0.0;
};

/// Deterministic limit barrier of the mean-field system.
struct LimitBarrier {
    SampledPath y;
    SampledPath v;
    SampledPath expected_m;  ///< sample mean of the regulator at the fixed point
    std::size_t iterations = 0;
    std::size_t windows = 0;
    double residual = 0.0;   ///< largest final sup-change over the windows
};

namespace detail {

inline constexpr std::size_t kMcChunk = 2048;

// Per-path state carried across a renewal point.
struct McPathState {
    std::vector<double> bm;   // B_j at the window start
    std::vector<double> run;  // running sup of the deficit y - xi - B
};

// Mean regulator on (ka, kb] for barrier y; optionally commits path states to kb.
inline std::vector<double> mean_regulator(const std::vector<double>& xi, McPathState& st,
                                          const std::vector<double>& y, std::size_t ka, std::size_t kb,
                                          const LimitMcParams& p, bool commit) {
    const std::size_t M = xi.size();
    const std::size_t len = kb - ka;
    const std::size_t nc = chunk_count(M, kMcChunk);
    std::vector<std::vector<double>> acc(nc);
    const double sd = std::sqrt(p.dt);
    const bool bridge = p.monitoring == Monitoring::bridge;
    parallel_chunks(M, [&](std::size_t b, std::size_t e, std::size_t c) {
        std::vector<double>& a = acc[c];
        a.assign(len, 0.0);
        for (std::size_t j = b; j < e; ++j) {
            double bm = st.bm[j];
            double run = st.run[j];
            double d0 = y[ka] - (xi[j] + bm);
            NormalPair np{};
            for (std::size_t k = ka; k < kb; ++k) {
                if (k % 2 == 0 || k == ka) np = normal_pair(p.seed, Stream::brownian, j, k / 2);
                const bool odd = (k % 2) != 0;
                bm = bm + sd * (odd ? np.z1 : np.z0);
                const double d1 = y[k + 1] - (xi[j] + bm);
                double top = d1;
                if (bridge) {
                    const double u = odd ? np.u1 : np.u0;
                    const double diff = d1 - d0;
                    top = 0.5 * (d0 + d1 + std::sqrt(diff * diff - 2.0 * p.dt * std::log(u)));
                }
                run = std::max(run, top);
                a[k - ka] += run;
                d0 = d1;
            }
            if (commit) {
                st.bm[j] = bm;
                st.run[j] = run;
            }
        }
    }, kMcChunk);
    std::vector<double> mean(len);
    std::vector<double> col(nc);
    for (std::size_t k = 0; k < len; ++k) {
        for (std::size_t c = 0; c < nc; ++c) col[c] = acc[c][k];
        mean[k] = tree_sum(col) / static_cast<double>(M);
    }
    return mean;
}

}  // namespace detail

/// Picard fixed point y = v0 t - K int_0^t E m(s) ds for the limiting barrier,
/// with E m estimated from M stored-seed paths (common random numbers) and
/// renewal windows of length < sqrt(2/K) on which the map contracts.
///
/// Throws convergence_error if a window does not settle within max_iter sweeps.
inline LimitBarrier solve_limit_mc(const InitialDistribution& init, const LimitMcParams& p) {
    if (!(p.K >= 0.0) || !std::isfinite(p.K)) throw invalid_input("solve_limit_mc: K must be >= 0");
    if (p.M == 0) throw invalid_input("solve_limit_mc: M must be >= 1");
    if (!(p.tol > 0.0)) throw invalid_input("solve_limit_mc: tol must be positive");
    if (p.max_iter == 0) throw invalid_input("solve_limit_mc: max_iter must be >= 1");
    const std::size_t N = grid_steps(p.T, p.dt);
    auto guess = p.initial_guess ? p.initial_guess : [v0 = p.v0](double t) { return v0 * t; };

    const auto xi = sample_initial(init, p.M, p.seed);
    detail::McPathState st{std::vector<double>(p.M, 0.0), std::vector<double>(p.M, 0.0)};

    std::vector<double> y(N + 1), v(N + 1, p.v0), em(N + 1, 0.0);
    for (std::size_t k = 0; k <= N; ++k) y[k] = guess(static_cast<double>(k) * p.dt);
    y[0] = 0.0;

    LimitBarrier out;
    if (p.K == 0.0) {
        for (std::size_t k = 0; k <= N; ++k) y[k] = p.v0 * (static_cast<double>(k) * p.dt);
        const auto mean = detail::mean_regulator(xi, st, y, 0, N, p, true);
        std::copy(mean.begin(), mean.end(), em.begin() + 1);
        out.iterations = 1;
        out.windows = 1;
    } else {
        const double L = p.window > 0.0 ? p.window : std::min(p.T, 0.9 * std::sqrt(2.0 / p.K));
        const auto W = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(L / p.dt + 1e-9)));
        std::size_t ka = 0;
        while (ka < N) {
            const std::size_t kb = std::min(N, ka + W);
            double prev = std::numeric_limits<double>::infinity();
            double change = 0.0;
            bool settled = false;
            for (std::size_t it = 0; it < p.max_iter; ++it) {
                const auto mean = detail::mean_regulator(xi, st, y, ka, kb, p, false);
                std::vector<double> ynew(kb - ka + 1);
                ynew[0] = y[ka];
                double vprev = p.v0 - p.K * em[ka];
                for (std::size_t k = 0; k < kb - ka; ++k) {
                    const double vk = p.v0 - p.K * mean[k];
                    ynew[k + 1] = ynew[k] + 0.5 * p.dt * (vprev + vk);
                    vprev = vk;
                }
                double raw = 0.0;
                for (std::size_t k = 1; k < ynew.size(); ++k) raw = std::max(raw, std::abs(ynew[k] - y[ka + k]));
                const double w = raw > prev ? 0.5 : 1.0;
                change = 0.0;
                for (std::size_t k = 1; k < ynew.size(); ++k) {
                    const double next = y[ka + k] + w * (ynew[k] - y[ka + k]);
                    change = std::max(change, std::abs(next - y[ka + k]));
                    y[ka + k] = next;
                }
                prev = raw;
                ++out.iterations;
                if (change <= p.tol) {
                    settled = true;
                    break;
                }
            }
            if (!settled)
                throw convergence_error("solve_limit_mc: Picard iteration did not converge", change);
            out.residual = std::max(out.residual, change);
            const auto mean = detail::mean_regulator(xi, st, y, ka, kb, p, true);
            std::copy(mean.begin(), mean.end(), em.begin() + static_cast<std::ptrdiff_t>(ka) + 1);
            // Continue the initial guess from the renewal point.
            for (std::size_t k = kb + 1; k <= N; ++k)
                y[k] = y[kb] + guess(static_cast<double>(k) * p.dt) - guess(static_cast<double>(kb) * p.dt);
            ka = kb;
            ++out.windows;
        }
    }
    for (std::size_t k = 0; k <= N; ++k) v[k] = p.v0 - p.K * em[k];
    out.y = SampledPath(0.0, p.dt, std::move(y));
    out.v = SampledPath(0.0, p.dt, std::move(v));
    out.expected_m = SampledPath(0.0, p.dt, std::move(em));
    return out;
}

}  // namespace inert
