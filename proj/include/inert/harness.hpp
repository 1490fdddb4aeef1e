#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "inert/gamma_map.hpp"
#include "inert/meanfield_pde.hpp"
#include "inert/parallel.hpp"
#include "inert/particle_sim.hpp"
#include "inert/random.hpp"
#include "inert/wasserstein.hpp"

namespace inert {

inline double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = sample_mean(a), mb = sample_mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        sab += (a[r] - ma) * (b[r] - mb);
        saa += (a[r] - ma) * (a[r] - ma);
        sbb += (b[r] - mb) * (b[r] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------
// Hydrodynamic limit

struct HydroRow {
    std::size_t n;
    double mean_w1, sd_w1;
    double mean_supY, sd_supY;
};

struct HydroTable {
    std::vector<HydroRow> rows;
    std::size_t reps = 0;
};

/// Distance of the finite-n system to the limit (p(T, .), y): W1 of the final
/// empirical measure against the limit density and sup_t |Y^(n) - y|.
/// `tmpl` supplies T, dt, K, v0 and init; n and seed are overridden.
inline HydroTable hydro_convergence(const SimConfig& tmpl, const std::vector<std::size_t>& n_list,
                                    std::size_t reps, std::uint64_t seed, const DensityField& limit) {
    if (reps == 0) throw invalid_input("hydro_convergence: reps must be >= 1");
    if (n_list.empty() || !std::is_sorted(n_list.begin(), n_list.end()))
        throw invalid_input("hydro_convergence: n_list must be nonempty and ascending");
    if (std::abs(limit.times.back() - tmpl.T) > 1e-9) throw invalid_input("hydro_convergence: limit horizon differs from T");
    const GridDensity pT = limit.final_density();
    HydroTable out;
    out.reps = reps;
    for (std::size_t n : n_list) {
        std::vector<double> w1(reps), sy(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            SimConfig cfg = tmpl;
            cfg.n = n;
            cfg.seed = derive_seed(seed, n, r);
            const std::size_t N = cfg.steps();
            const auto run = simulate_streaming(cfg, {N});
            w1[r] = wp_vs_density(run.snapshots.front().second, pT, 1.0);
            double s = 0.0;
            for (std::size_t k = 0; k <= N; ++k)
                s = std::max(s, std::abs(run.barrier.y[k] - limit.y.at(run.barrier.y.time(k))));
            sy[r] = s;
        }
        out.rows.push_back({n, sample_mean(w1), sample_sd(w1), sample_mean(sy), sample_sd(sy)});
    }
    return out;
}

/// Row k+1 is no worse than row k up to one standard deviation of row k.
inline bool decreasing_with_slack(const std::vector<double>& mean, const std::vector<double>& sd) {
    for (std::size_t k = 0; k + 1 < mean.size(); ++k)
        if (mean[k + 1] > mean[k] + sd[k]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Propagation of chaos

struct ChaosRow {
    std::size_t n;
    double corr;
    double ci_halfwidth;  ///< 1.96 / sqrt(reps)
};

struct ChaosTable {
    std::vector<ChaosRow> rows;
    std::size_t reps = 0;
    bool low_reps = false;  ///< reps < 30: the interval is not trustworthy
};

/// Pearson correlation of (X_i(T), X_j(T)) over replicates, for each n.
/// Replicate r uses seed derive_seed(seed, r) for every n, so the initial
/// positions and driving paths of particles i and j are shared across n and
/// only the population around them grows.
inline ChaosTable chaos_test(const SimConfig& tmpl, std::size_t i, std::size_t j,
                             const std::vector<std::size_t>& n_list, std::size_t reps, std::uint64_t seed) {
    if (i == j) throw invalid_input("chaos_test: pair indices must differ");
    if (n_list.empty()) throw invalid_input("chaos_test: empty n_list");
    if (std::max(i, j) >= *std::min_element(n_list.begin(), n_list.end()))
        throw invalid_input("chaos_test: pair index exceeds the smallest n");
    if (reps < 2) throw invalid_input("chaos_test: reps must be >= 2");
    ChaosTable out;
    out.reps = reps;
    out.low_reps = reps < 30;
    const double ci = 1.96 / std::sqrt(static_cast<double>(reps));
    for (std::size_t n : n_list) {
        std::vector<double> a(reps), b(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            SimConfig cfg = tmpl;
            cfg.n = n;
            cfg.seed = derive_seed(seed, r);
            const auto run = simulate_streaming(cfg);
            a[r] = run.final_x[i];
            b[r] = run.final_x[j];
        }
        out.rows.push_back({n, pearson(a, b), ci});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Refinement rate of the epsilon-recursion

struct GammaRateRow {
    int level;
    double eps;
    double measured;  ///< sup |y_{eps} - y_{eps/2}|
    double bound;     ///< ((2+K)||f||/n) eps e^{KT}
};

struct GammaRateTable {
    std::vector<GammaRateRow> rows;
    std::size_t violations = 0;
    double rate = 0.0;  ///< fitted gap ratio per halving; NaN if any gap is 0
};

/// Least-squares slope of log2(gap) against level, as a ratio per halving.
inline double fitted_halving_rate(const std::vector<GammaRateRow>& rows) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& r : rows) {
        if (!(r.measured > 0.0)) return std::nan("");
        const double x = r.level, y = std::log2(r.measured);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(rows.size());
    return std::exp2((m * sxy - sx * sy) / (m * sxx - sx * sx));
}

/// Gaps between the barriers at eps = T 2^{-l} and T 2^{-l-1} for l in
/// [l_min, l_max - 1], with drivers sampled at dt = T 2^{-l_max}.
inline GammaRateTable gamma_rate_study(std::span<const SampledPath> f, double v0, double K, int l_min, int l_max) {
    if (f.empty()) throw invalid_input("gamma_rate_study: no drivers");
    if (l_min < 0 || l_min >= l_max) throw invalid_input("gamma_rate_study: need 0 <= l_min < l_max");
    const double T = f[0].t_end() - f[0].t0();
    if (f[0].steps() != (std::size_t{1} << l_max)) throw invalid_input("gamma_rate_study: drivers must have 2^l_max steps");
    GammaRateTable out;
    GammaResult coarse = solve_gamma(f, v0, K, T * std::exp2(-l_min));
    for (int l = l_min; l < l_max; ++l) {
        GammaResult fine = solve_gamma(f, v0, K, T * std::exp2(-(l + 1)));
        const double eps = T * std::exp2(-l);
        const GammaRateRow row{l, eps, sup_distance(coarse.barrier.y, fine.barrier.y), cauchy_bound(f, K, eps)};
        if (row.measured > row.bound) ++out.violations;
        out.rows.push_back(row);
        coarse = std::move(fine);
    }
    out.rate = fitted_halving_rate(out.rows);
    return out;
}

/// n Brownian drivers started at 0 on [0, T] with 2^l_max steps.
inline std::vector<SampledPath> brownian_drivers(std::size_t n, double T, int l_max, std::uint64_t seed) {
    return sample_brownian(n, T, T * std::exp2(-l_max), seed);
}

}  // namespace inert
