#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "inert/error.hpp"
#include "inert/measure.hpp"

namespace inert {

/// Probability density sampled on x0 + j*dx, normalized to unit trapezoidal mass.
class GridDensity {
public:
    GridDensity(double x0, double dx, std::vector<double> weights) : x0_(x0), dx_(dx), w_(std::move(weights)) {
        if (!(dx_ > 0.0) || !std::isfinite(dx_) || !std::isfinite(x0_))
            throw invalid_input("GridDensity: dx must be positive");
        if (w_.size() < 2) throw invalid_input("GridDensity: need at least two grid points");
        for (double v : w_)
            if (!(v >= 0.0) || !std::isfinite(v)) throw invalid_input("GridDensity: weights must be finite and >= 0");
        const double mass = trapezoid_mass();
        if (!(mass > 0.0)) throw invalid_input("GridDensity: zero mass");
        for (double& v : w_) v /= mass;
        build_cdf();
    }

    double x0() const noexcept { return x0_; }
    double dx() const noexcept { return dx_; }
    std::size_t size() const noexcept { return w_.size(); }
    double x(std::size_t j) const noexcept { return x0_ + static_cast<double>(j) * dx_; }
    std::span<const double> weights() const noexcept { return w_; }
    std::span<const double> cdf() const noexcept { return cdf_; }

    double trapezoid_mass() const {
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < w_.size(); ++j) s += 0.5 * (w_[j] + w_[j + 1]) * dx_;
        return s;
    }

    double mean() const {
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < w_.size(); ++j)
            s += 0.5 * (w_[j] * x(j) + w_[j + 1] * x(j + 1)) * dx_;
        return s;
    }

    /// Inverse of the piecewise-linear CDF through the trapezoidal node values.
    double quantile(double u) const {
        if (u <= 0.0) return x(first_positive());
        if (u >= 1.0) return x(last_positive());
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        const std::size_t j = static_cast<std::size_t>(it - cdf_.begin());
        if (j == 0) return x(0);
        const double c0 = cdf_[j - 1], c1 = cdf_[j];
        return x(j - 1) + (u - c0) / (c1 - c0) * dx_;
    }

    GridDensity shifted(double s) const { return GridDensity(x0_ + s, dx_, w_); }

private:
    void build_cdf() {
        cdf_.assign(w_.size(), 0.0);
        for (std::size_t j = 1; j < w_.size(); ++j) cdf_[j] = cdf_[j - 1] + 0.5 * (w_[j - 1] + w_[j]) * dx_;
        const double total = cdf_.back();
        for (double& c : cdf_) c /= total;
        cdf_.back() = 1.0;
    }
    std::size_t first_positive() const {
        std::size_t j = 0;
        while (j + 1 < cdf_.size() && cdf_[j + 1] <= 0.0) ++j;
        return j;
    }
    std::size_t last_positive() const {
        std::size_t j = cdf_.size() - 1;
        while (j > 0 && cdf_[j - 1] >= 1.0) --j;
        return j;
    }

    double x0_, dx_;
    std::vector<double> w_;
    std::vector<double> cdf_;
};

/// Exact W_p between equal-size empirical measures on the line (sorted coupling).
inline double wp_empirical(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p = 1.0) {
    if (a.size() != b.size()) throw invalid_input("wp_empirical: atom counts differ");
    if (!(p >= 1.0)) throw invalid_input("wp_empirical: p must be >= 1");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), p);
    return std::pow(s / static_cast<double>(a.size()), 1.0 / p);
}

/// (1/n sum |x_i - y_i|^p)^{1/p} for a given pairing; an upper bound on W_p.
inline double wp_pairing_cost(std::span<const double> x, std::span<const double> y, double p = 1.0) {
    if (x.size() != y.size() || x.empty()) throw invalid_input("wp_pairing_cost: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - y[i]), p);
    return std::pow(s / static_cast<double>(x.size()), 1.0 / p);
}

enum class QuantileRule {
    exact,     ///< integrate |F_a^{-1} - F_d^{-1}|^p exactly over every breakpoint
    midpoint,  ///< one node per empirical quantile at u_i = (i - 1/2)/n
};

namespace detail {

// Integral of |g|^p over an interval where g runs linearly from g0 to g1, divided by the slope.
inline double power_segment(double g0, double g1, double len, double p) {
    const double span = std::abs(g1 - g0);
    const double scale = std::max(std::abs(g0), std::abs(g1));
    if (span <= 1e-7 * scale || span == 0.0) return std::pow(std::abs(0.5 * (g0 + g1)), p) * len;
    auto G = [p](double w) { return std::copysign(std::pow(std::abs(w), p + 1.0) / (p + 1.0), w); };
    return (G(g1) - G(g0)) / (g1 - g0) * len;
}

}  // namespace detail

/// W_p between an empirical measure and a grid density through quantile
/// functions, W_p^p = int_0^1 |F_a^{-1}(u) - F_d^{-1}(u)|^p du.
inline double wp_vs_density(const EmpiricalMeasure& a, const GridDensity& d, double p = 1.0,
                            QuantileRule rule = QuantileRule::exact) {
    if (!(p >= 1.0)) throw invalid_input("wp_vs_density: p must be >= 1");
    const std::size_t n = a.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    double total = 0.0;
    if (rule == QuantileRule::midpoint) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (static_cast<double>(i) + 0.5) * inv_n;
            total += std::pow(std::abs(a[i] - d.quantile(u)), p);
        }
        return std::pow(total * inv_n, 1.0 / p);
    }

    // Merge the empirical steps (i/n) with the density's CDF nodes; on each
    // piece F_a^{-1} is constant and F_d^{-1} is linear.
    const auto cdf = d.cdf();
    std::size_t j = 0;  // density segment [cdf[j], cdf[j+1]]
    while (j + 2 < cdf.size() && cdf[j + 1] <= 0.0) ++j;
    for (std::size_t i = 0; i < n; ++i) {
        double lo = static_cast<double>(i) * inv_n;
        const double hi = (i + 1 == n) ? 1.0 : static_cast<double>(i + 1) * inv_n;
        while (lo < hi) {
            while (j + 2 < cdf.size() && cdf[j + 1] <= lo) ++j;
            const double c0 = cdf[j], c1 = cdf[j + 1];
            const double seg_hi = std::min(hi, c1);
            if (seg_hi <= lo) {  // final segment exhausted by rounding
                total += std::pow(std::abs(a[i] - d.x(j + 1)), p) * (hi - lo);
                break;
            }
            const double slope = d.dx() / (c1 - c0);
            const double q0 = d.x(j) + (lo - c0) * slope;
            const double q1 = d.x(j) + (seg_hi - c0) * slope;
            total += detail::power_segment(q0 - a[i], q1 - a[i], seg_hi - lo, p);
            lo = seg_hi;
        }
    }
    return std::pow(total, 1.0 / p);
}

}  // namespace inert
