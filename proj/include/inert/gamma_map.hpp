#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "inert/parallel.hpp"
#include "inert/sampled_path.hpp"
#include "inert/skorohod.hpp"

namespace inert {

/// Barrier position y and velocity v on the particle grid.
///
/// v(k) = v0 - (K/n) sum_i m_i(k). y is the exact integral of the
/// right-continuous step velocity held on each lattice interval, so y is
/// piecewise linear and concave.
struct BarrierTrajectory {
    SampledPath y;
    SampledPath v;
    double impulse_K = 0.0;
    double v0 = 0.0;
};

struct GammaResult {
    BarrierTrajectory barrier;
    std::vector<SampledPath> m;  ///< per-particle regulators against barrier.y
    std::vector<SampledPath> x;  ///< reflected paths f_i + m_i
    double eps_used = 0.0;       ///< lattice step of the recursion
    std::size_t stride = 1;      ///< eps_used / dt
};

inline double barrier_velocity(double v0, double K, std::size_t n, double regulator_sum) {
    return v0 - (K / static_cast<double>(n)) * regulator_sum;
}

/// Time-major engine for the epsilon-recursion of the n-particle Skorohod map.
///
/// On each lattice interval [M eps, (M+1) eps) the barrier moves with the
/// velocity v0 - (K/n) sum_i sup_{u <= M eps} max(y(u) - f_i(u), 0), i.e. the
/// velocity at the left lattice point. Driving values are pulled one column
/// at a time, so callers can generate them on the fly.
class BarrierStepper {
public:
    BarrierStepper(std::span<const double> f0, double v0, double K, double dt, std::size_t stride = 1)
        : n_(f0.size()), v0_(v0), K_(K), dt_(dt), stride_(stride), regulators_(f0.size()),
          partial_(chunk_count(f0.size())) {
        if (n_ == 0) throw invalid_input("BarrierStepper: need at least one particle");
        if (stride_ == 0) throw invalid_input("BarrierStepper: stride must be >= 1");
        for (std::size_t i = 0; i < n_; ++i) regulators_[i] = std::max(0.0, -f0[i]);
        v_ = barrier_velocity(v0_, K_, n_, chunked_sum(regulators_));
    }

    /// Moves to step k+1. `next_f(i)` must return f_i(k+1); it is called once
    /// per particle, possibly from several threads for different i.
    template <class NextF>
    void advance(NextF&& next_f) {
        if (k_ % stride_ == 0) slope_ = v_;
        y_ += slope_ * dt_;
        const double y = y_;
        parallel_chunks(n_, [&](std::size_t b, std::size_t e, std::size_t c) {
            double sum = 0.0;
            for (std::size_t i = b; i < e; ++i) {
                const double fi = next_f(i);
                const double s = std::max(regulators_[i], -(fi - y));
                regulators_[i] = s;
                sum += s;
            }
            partial_[c] = sum;
        });
        v_ = barrier_velocity(v0_, K_, n_, tree_sum(partial_));
        ++k_;
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t step() const noexcept { return k_; }
    double y() const noexcept { return y_; }
    double v() const noexcept { return v_; }
    std::span<const double> regulators() const noexcept { return regulators_; }

private:
    std::size_t n_;
    double v0_, K_, dt_;
    std::size_t stride_;
    std::size_t k_ = 0;
    double y_ = 0.0;
    double v_ = 0.0;
    double slope_ = 0.0;
    std::vector<double> regulators_;
    std::vector<double> partial_;
};

namespace detail {

inline std::size_t lattice_stride(double eps, double dt) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw invalid_input("solve_gamma: eps must be positive");
    const double r = eps / dt;
    const double s = std::round(r);
    if (s < 1.0 || std::abs(r - s) > 1e-9 * std::max(1.0, r))
        throw invalid_input("solve_gamma: eps must be an integer multiple of the path step");
    return static_cast<std::size_t>(s);
}

inline void validate_drivers(std::span<const SampledPath> f, double K) {
    if (f.empty()) throw invalid_input("solve_gamma: need at least one driving path");
    if (!(K >= 0.0) || !std::isfinite(K)) throw invalid_input("solve_gamma: K must be >= 0");
    for (const auto& p : f) {
        require_same_grid(f[0], p, "solve_gamma");
        if (p[0] < 0.0) throw invalid_input("solve_gamma: driving paths must start at f_i(0) >= 0");
    }
}

}  // namespace detail

/// The n-particle Skorohod map: barrier (y, v) and regulators m_i for
/// driving paths f_i, initial velocity v0 and impulse constant K, computed by
/// the epsilon-recursion with eps a multiple of the path step.
inline GammaResult solve_gamma(std::span<const SampledPath> f, double v0, double K, double eps) {
    detail::validate_drivers(f, K);
    const SampledPath& g0 = f[0];
    const std::size_t stride = detail::lattice_stride(eps, g0.dt());
    const std::size_t n = f.size();
    const std::size_t steps = g0.steps();

    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = f[i][0];
    BarrierStepper stepper(col, v0, K, g0.dt(), stride);

    std::vector<double> y(steps + 1, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        stepper.advance([&](std::size_t i) { return f[i][k + 1]; });
        y[k + 1] = stepper.y();
    }

    GammaResult out;
    out.eps_used = static_cast<double>(stride) * g0.dt();
    out.stride = stride;
    out.barrier.impulse_K = K;
    out.barrier.v0 = v0;
    out.barrier.y = SampledPath(g0.t0(), g0.dt(), std::move(y));
    out.m.reserve(n);
    out.x.reserve(n);
    for (const auto& fi : f) {
        auto r = reflect_against_barrier(fi, out.barrier.y);
        out.x.push_back(std::move(r.x));
        out.m.push_back(std::move(r.m));
    }
    std::vector<double> v(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        for (std::size_t i = 0; i < n; ++i) col[i] = out.m[i][k];
        v[k] = barrier_velocity(v0, K, n, chunked_sum(col));
    }
    out.barrier.v = SampledPath(g0.t0(), g0.dt(), std::move(v));
    return out;
}

/// One halving step of solve_gamma_refined.
struct RefinementStep {
    double eps;
    double gap;  ///< sup |y_{2 eps} - y_{eps}|; NaN for the coarsest run
};

struct RefinedGamma {
    GammaResult result;
    bool converged = false;
    std::vector<RefinementStep> history;
};

/// Halves eps from the coarsest dyadic multiple of dt until successive
/// barriers differ by at most `tol` in sup norm. If dt is reached first the
/// finest result is returned with converged = false.
inline RefinedGamma solve_gamma_refined(std::span<const SampledPath> f, double v0, double K, double tol) {
    detail::validate_drivers(f, K);
    if (!(tol > 0.0)) throw invalid_input("solve_gamma_refined: tol must be positive");
    const double dt = f[0].dt();
    const std::size_t steps = f[0].steps();
    int j = 0;
    while ((std::size_t{1} << (j + 1)) <= steps) ++j;

    RefinedGamma out;
    out.result = solve_gamma(f, v0, K, dt * static_cast<double>(std::size_t{1} << j));
    out.history.push_back({out.result.eps_used, std::nan("")});
    while (j > 0) {
        --j;
        GammaResult finer = solve_gamma(f, v0, K, dt * static_cast<double>(std::size_t{1} << j));
        const double gap = sup_distance(out.result.barrier.y, finer.barrier.y);
        out.history.push_back({finer.eps_used, gap});
        out.result = std::move(finer);
        if (gap <= tol) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

/// Certified sensitivity of the barrier to a perturbation of the drivers of
/// summed sup size eta: ||V_f - V_g|| <= vbound, ||Y_f - Y_g|| <= ibound.
struct LipschitzEnvelope {
    double vbound;
    double ibound;
};

inline LipschitzEnvelope lipschitz_envelope(double eta, std::size_t n, double K, double T) {
    const double v = (K * eta / static_cast<double>(n)) * std::exp(K * T);
    return {v, v * T};
}

/// Dyadic Cauchy rate: ||Y_eps - Y_eps'|| <= ((2+K)||f||/n) eps e^{KT} for eps' < eps.
inline double cauchy_bound(std::span<const SampledPath> f, double K, double eps) {
    const double T = f[0].t_end() - f[0].t0();
    return ((2.0 + K) * summed_sup_norm(f) / static_cast<double>(f.size())) * eps * std::exp(K * T);
}

/// Envelope for sup_k |v(k) - v0|, from comparing the barrier with the line v0 t:
/// (K/n) sum_i sup_k max(v0 t_k - f_i(k), 0) + K max(v0, 0) T.
inline double velocity_envelope(std::span<const SampledPath> f, double v0, double K) {
    double total = 0.0;
    for (const auto& fi : f) {
        double s = 0.0;
        for (std::size_t k = 0; k < fi.size(); ++k)
            s = std::max(s, v0 * (fi.time(k) - fi.t0()) - fi[k]);
        total += s;
    }
    const double T = f[0].t_end() - f[0].t0();
    return (K / static_cast<double>(f.size())) * total + K * std::max(v0, 0.0) * T;
}

}  // namespace inert
