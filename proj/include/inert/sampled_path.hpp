#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inert/error.hpp"

namespace inert {

/// A real-valued path sampled on the uniform grid t0 + k*dt, k = 0..N.
///
/// Between grid points the path is the linear interpolant, so running
/// extrema taken over grid points are exact.
class SampledPath {
public:
    SampledPath() = default;

    SampledPath(double t0, double dt, std::vector<double> values)
        : t0_(t0), dt_(dt), values_(std::move(values)) {
        validate();
    }

    /// Path of `steps + 1` copies of `value`.
    static SampledPath constant(double t0, double dt, std::size_t steps, double value) {
        return SampledPath(t0, dt, std::vector<double>(steps + 1, value));
    }

    /// Samples `fn(t)` on the grid.
    template <class Fn>
    static SampledPath from_function(double t0, double dt, std::size_t steps, Fn&& fn) {
        std::vector<double> v(steps + 1);
        for (std::size_t k = 0; k <= steps; ++k) v[k] = fn(t0 + static_cast<double>(k) * dt);
        return SampledPath(t0, dt, std::move(v));
    }

    double t0() const noexcept { return t0_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::size_t steps() const noexcept { return values_.empty() ? 0 : values_.size() - 1; }
    double t_end() const noexcept { return time(steps()); }
    double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * dt_; }

    double operator[](std::size_t k) const noexcept { return values_[k]; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& data() const noexcept { return values_; }

    /// Piecewise-linear evaluation; clamps outside [t0, t_end].
    double at(double t) const {
        if (t <= t0_) return values_.front();
        const double s = (t - t0_) / dt_;
        const auto k = static_cast<std::size_t>(s);
        if (k >= steps()) return values_.back();
        const double w = s - static_cast<double>(k);
        return (1.0 - w) * values_[k] + w * values_[k + 1];
    }

private:
    void validate() const {
        if (!(dt_ > 0.0) || !std::isfinite(dt_))
            throw invalid_input("SampledPath: dt must be positive and finite");
        if (!std::isfinite(t0_)) throw invalid_input("SampledPath: t0 must be finite");
        if (values_.size() < 2) throw invalid_input("SampledPath: need at least two samples");
        for (double v : values_)
            if (!std::isfinite(v)) throw invalid_input("SampledPath: non-finite value");
    }

    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<double> values_;
};

/// True when both paths share t0, dt and length (t0/dt compared to 1e-12 relative).
inline bool same_grid(const SampledPath& a, const SampledPath& b) {
    auto close = [](double x, double y) {
        return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
    };
    return a.size() == b.size() && close(a.t0(), b.t0()) && close(a.dt(), b.dt());
}

inline void require_same_grid(const SampledPath& a, const SampledPath& b, const char* where) {
    if (!same_grid(a, b)) throw invalid_input(std::string(where) + ": grid mismatch");
}

inline double sup_norm(const SampledPath& a) {
    double s = 0.0;
    for (double v : a.values()) s = std::max(s, std::abs(v));
    return s;
}

/// sup_k |a(k) - b(k)| on a shared grid.
inline double sup_distance(const SampledPath& a, const SampledPath& b) {
    require_same_grid(a, b, "sup_distance");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
    return s;
}

/// Summed sup norm of a family, sum_i ||f_i||.
inline double summed_sup_norm(std::span<const SampledPath> f) {
    double s = 0.0;
    for (const auto& p : f) s += sup_norm(p);
    return s;
}

/// Number of grid steps of length dt in [0, T]; throws unless T/dt is an integer within 1e-9.
inline std::size_t grid_steps(double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0) || dt > T * (1.0 + 1e-12) || !std::isfinite(T))
        throw invalid_input("grid: need 0 < dt <= T");
    const double r = T / dt;
    const double n = std::round(r);
    if (std::abs(r - n) > 1e-9) throw invalid_input("grid: T/dt must be an integer");
    return static_cast<std::size_t>(n);
}

}  // namespace inert
