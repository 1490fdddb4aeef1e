#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "inert/sampled_path.hpp"

namespace inert {

/// Reflected path x = f + m and its regulator m.
struct ReflectionResult {
    SampledPath x;
    SampledPath m;
};

/// Tolerance (path units) for the discrete flatness check.
inline constexpr double kFlatTol = 1e-9;

namespace detail {

// m(k) = max_{j<=k} max(y(j) - f(j), 0); y empty means y == 0.
inline std::vector<double> running_regulator(std::span<const double> f, std::span<const double> y) {
    std::vector<double> m(f.size());
    double run = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double deficit = y.empty() ? -f[k] : -(f[k] - y[k]);
        run = std::max(run, deficit);
        m[k] = run;
    }
    return m;
}

inline ReflectionResult assemble(const SampledPath& f, std::vector<double> m) {
    std::vector<double> x(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) x[k] = f[k] + m[k];
    return {SampledPath(f.t0(), f.dt(), std::move(x)), SampledPath(f.t0(), f.dt(), std::move(m))};
}

}  // namespace detail

/// Classical one-sided Skorohod map on [t0, T]:
/// m(t) = sup_{s<=t} max(-f(s), 0), x = f + m >= 0.
///
/// The left endpoint is included, so f(t0) < 0 yields m(t0) = -f(t0).
inline ReflectionResult reflect_path(const SampledPath& f) {
    return detail::assemble(f, detail::running_regulator(f.values(), {}));
}

/// Skorohod map relative to a moving lower barrier y: the regulator of f - y,
/// added back to f, so x = f + m >= y.
inline ReflectionResult reflect_against_barrier(const SampledPath& f, const SampledPath& y) {
    require_same_grid(f, y, "reflect_against_barrier");
    return detail::assemble(f, detail::running_regulator(f.values(), y.values()));
}

/// Discrete flatness: m may only grow at steps where x sits on the barrier.
inline bool is_flat_off_contact(const ReflectionResult& r, const SampledPath* barrier = nullptr,
                                double tol = kFlatTol) {
    for (std::size_t k = 1; k < r.m.size(); ++k) {
        if (r.m[k] > r.m[k - 1]) {
            const double gap = r.x[k] - (barrier ? (*barrier)[k] : 0.0);
            if (gap > tol) return false;
        }
    }
    return true;
}

}  // namespace inert
