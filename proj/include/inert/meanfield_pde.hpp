#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

#include "inert/error.hpp"
#include "inert/particle_sim.hpp"
#include "inert/sampled_path.hpp"
#include "inert/wasserstein.hpp"

namespace inert {

/// Point mass initial condition; the solver starts from the reflected heat
/// kernel at t0 = 10 dt_pde.
struct PointMass {
    double x0 = 0.0;
};

using PdeInitial = std::variant<GridDensity, PointMass>;

struct PdeParams {
    double v0 = 0.0;
    double K = 0.0;
    double T = 1.0;
    double dt = 2.5e-5;
    double dx = 5e-3;
    double x_max = 0.0;          ///< <= 0 picks support + 6 sqrt(T) + |v0| T
    std::size_t max_rows = 200;  ///< stored u(t, .) rows (first and last always kept)
};

/// u(t, x) = p(t, x + y(t)) on the half-line grid x_j = j dx, with the barrier.
struct DensityField {
    std::vector<double> times;           ///< times of the stored rows of u
    std::vector<std::vector<double>> u;  ///< u[row][j]; last node is the Dirichlet end
    double dx = 0.0;
    SampledPath y;                       ///< barrier on the full step grid from t = 0
    SampledPath yprime;
    SampledPath boundary;                ///< u(t, 0) from t_start on
    double t_start = 0.0;
    double initial_boundary_integral = 0.0;  ///< int_0^{t_start} u(s, 0) ds
    double K = 0.0;
    double v0 = 0.0;
    bool prescribed = false;             ///< barrier given, not solved for
    double max_mass_error = 0.0;
    std::size_t clipped = 0;             ///< nodes clipped from below -1e-10

    std::size_t nx() const { return u.empty() ? 0 : u.front().size(); }

    /// p(times[row], .) in fixed coordinates (grid starts at y(t)).
    GridDensity density_at(std::size_t row) const {
        return GridDensity(y.at(times[row]), dx, u.at(row));
    }
    GridDensity final_density() const { return density_at(u.size() - 1); }
};

inline double default_x_max(double support, double T, double v0) {
    return support + 6.0 * std::sqrt(T) + std::abs(v0) * T;
}

namespace detail {

inline double gauss(double x, double var) {
    return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

// A(t) = int_0^t 2 phi_s(x0) ds and B(t) = int_0^t (t - s) 2 phi_s(x0) ds: boundary
// density integrals of the kernel reflected at a fixed wall, via s = w^2.
inline std::pair<double, double> image_boundary_integrals(double x0, double t) {
    if (t <= 0.0) return {0.0, 0.0};
    if (x0 == 0.0) {
        const double c = std::sqrt(2.0 / std::numbers::pi);
        return {2.0 * c * std::sqrt(t), (4.0 / 3.0) * c * t * std::sqrt(t)};
    }
    const int n = 400;  // Simpson, even
    const double h = std::sqrt(t) / n;
    double A = 0.0, B = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = i * h;
        const double wt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double g = w > 0.0 ? 4.0 / std::sqrt(2.0 * std::numbers::pi) * std::exp(-x0 * x0 / (2.0 * w * w)) : 0.0;
        A += wt * g;
        B += wt * g * (t - w * w);
    }
    return {A * h / 3.0, B * h / 3.0};
}

inline double trapezoid_mass(const std::vector<double>& u, double dx) {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < u.size(); ++j) s += 0.5 * (u[j] + u[j + 1]) * dx;
    return s;
}

// Conservative CN step for u_t = d/dx(u_x / 2 + a u) with zero flux at x = 0
// (u_x = -2 a u there) and u = 0 at the far node. Centered advective flux
// unless the cell Peclet number |a| dx / (1/2) exceeds 2.
class HeatStepper {
public:
    HeatStepper(std::size_t nodes, double dt, double dx)
        : m_(nodes - 1), dt_(dt), dx_(dx), lo_(m_), di_(m_), up_(m_), rhs_(m_), cp_(m_) {}

    void step(const std::vector<double>& u, double a, std::vector<double>& out) {
        double p, q;
        const double d2 = 0.5 / (dx_ * dx_);
        if (std::abs(a) * dx_ > 1.0) {
            p = a > 0.0 ? d2 + a / dx_ : d2;
            q = a > 0.0 ? -d2 : -d2 + a / dx_;
        } else {
            p = d2 + 0.5 * a / dx_;
            q = -d2 + 0.5 * a / dx_;
        }
        // L u: row 0 -> 2(p u1 + q u0); row j -> p u_{j+1} + (q - p) u_j - q u_{j-1}
        for (std::size_t j = 0; j < m_; ++j) {
            lo_[j] = j == 0 ? 0.0 : -q;
            di_[j] = j == 0 ? 2.0 * q : q - p;
            up_[j] = j == 0 ? 2.0 * p : p;
        }
        const double h = 0.5 * dt_;
        for (std::size_t j = 0; j < m_; ++j) {
            double Lu = di_[j] * u[j];
            if (j > 0) Lu += lo_[j] * u[j - 1];
            if (j + 1 < m_) Lu += up_[j] * u[j + 1];
            rhs_[j] = u[j] + h * Lu;
        }
        // Thomas on (I - h L).
        double b0 = 1.0 - h * di_[0];
        cp_[0] = (-h * up_[0]) / b0;
        rhs_[0] /= b0;
        for (std::size_t j = 1; j < m_; ++j) {
            const double a_j = -h * lo_[j];
            const double b_j = 1.0 - h * di_[j] - a_j * cp_[j - 1];
            cp_[j] = (-h * up_[j]) / b_j;
            rhs_[j] = (rhs_[j] - a_j * rhs_[j - 1]) / b_j;
        }
        out.assign(m_ + 1, 0.0);
        out[m_ - 1] = rhs_[m_ - 1];
        for (std::size_t j = m_ - 1; j-- > 0;) out[j] = rhs_[j] - cp_[j] * out[j + 1];
        out[m_] = 0.0;
    }

private:
    std::size_t m_;
    double dt_, dx_;
    std::vector<double> lo_, di_, up_, rhs_, cp_;
};

struct BarrierSpec {
    bool prescribed = false;
    double v0 = 0.0;
    double K = 0.0;
    const SampledPath* g = nullptr;
};

inline double g_slope(const SampledPath& g, double t, double h) {
    return (g.at(t + h) - g.at(std::max(0.0, t - h))) / (t + h - std::max(0.0, t - h));
}

inline DensityField run_heat(const PdeInitial& init, double T, double dt, double dx, double x_max,
                             std::size_t max_rows, const BarrierSpec& bs) {
    const std::size_t N = grid_steps(T, dt);
    if (!(dx > 0.0)) throw invalid_input("PDE: dx must be positive");
    if (dt > dx * dx * (1.0 + 1e-12)) throw invalid_input("PDE: need dt_pde <= dx^2");
    if (!(bs.K >= 0.0)) throw invalid_input("PDE: K must be >= 0");
    const auto nodes = static_cast<std::size_t>(std::ceil(x_max / dx - 1e-9)) + 1;
    if (nodes < 4) throw invalid_input("PDE: x_max too small for dx");

    DensityField f;
    f.dx = dx;
    f.K = bs.K;
    f.v0 = bs.v0;
    f.prescribed = bs.prescribed;

    std::vector<double> y(N + 1, 0.0), yp(N + 1, bs.v0);
    std::vector<double> u(nodes, 0.0);
    std::size_t start = 0;

    auto barrier_at = [&](std::size_t k) { return bs.g->at(static_cast<double>(k) * dt); };
    auto slope_at = [&](std::size_t k) { return g_slope(*bs.g, static_cast<double>(k) * dt, dt); };

    if (const auto* pm = std::get_if<PointMass>(&init)) {
        if (!(pm->x0 >= 0.0) || pm->x0 >= x_max) throw invalid_input("PDE: point mass outside [0, x_max)");
        start = std::min<std::size_t>(10, N);
        const double t0 = static_cast<double>(start) * dt;
        for (std::size_t j = 0; j + 1 < nodes; ++j) {
            const double x = static_cast<double>(j) * dx;
            u[j] = gauss(x - pm->x0, t0) + gauss(x + pm->x0, t0);
        }
        for (std::size_t k = 0; k <= start; ++k) {
            const double t = static_cast<double>(k) * dt;
            if (bs.prescribed) {
                y[k] = barrier_at(k);
                yp[k] = slope_at(k);
            } else {
                const auto [A, B] = image_boundary_integrals(pm->x0, t);
                yp[k] = bs.v0 - 0.5 * bs.K * A;
                y[k] = bs.v0 * t - 0.5 * bs.K * B;
            }
        }
        f.initial_boundary_integral = image_boundary_integrals(pm->x0, t0).first;
    } else {
        const auto& d = std::get<GridDensity>(init);
        if (d.x0() < -1e-12) throw invalid_input("PDE: initial density must live on [0, inf)");
        for (std::size_t j = 0; j + 1 < nodes; ++j) {
            const double x = static_cast<double>(j) * dx;
            const double s = (x - d.x0()) / d.dx();
            if (s < -1e-12 || s > static_cast<double>(d.size() - 1) + 1e-12) continue;
            const auto i = std::min(static_cast<std::size_t>(std::max(0.0, s)), d.size() - 2);
            const double w = s - static_cast<double>(i);
            u[j] = (1.0 - w) * d.weights()[i] + w * d.weights()[i + 1];
        }
        if (bs.prescribed) {
            y[0] = barrier_at(0);
            yp[0] = slope_at(0);
        }
    }
    const double m0 = trapezoid_mass(u, dx);
    if (!(m0 > 0.0)) throw invalid_input("PDE: initial density has no mass on the grid");
    if (std::holds_alternative<GridDensity>(init) && m0 < 1.0 - 1e-6)
        throw invalid_input("PDE: initial density extends past x_max");
    for (double& v : u) v /= m0;

    f.t_start = static_cast<double>(start) * dt;
    const std::size_t total = N - start;
    const std::size_t stride = std::max<std::size_t>(1, (total + max_rows - 1) / std::max<std::size_t>(1, max_rows));
    auto store = [&](std::size_t k) {
        f.times.push_back(static_cast<double>(k) * dt);
        f.u.push_back(u);
    };
    store(start);

    std::vector<double> trace(total + 1);
    trace[0] = u[0];
    HeatStepper heat(nodes, dt, dx);
    std::vector<double> next;
    for (std::size_t k = start; k < N; ++k) {
        if (bs.prescribed) {
            const double a = (barrier_at(k + 1) - barrier_at(k)) / dt;
            heat.step(u, a, next);
            y[k + 1] = barrier_at(k + 1);
            yp[k + 1] = slope_at(k + 1);
        } else {
            const double a0 = yp[k];
            const double u0 = u[0];
            heat.step(u, a0 - 0.25 * bs.K * u0 * dt, next);  // half-step predictor for y'
            double a1 = a0 - 0.5 * bs.K * dt * 0.5 * (u0 + next[0]);
            heat.step(u, 0.5 * (a0 + a1), next);
            a1 = a0 - 0.5 * bs.K * dt * 0.5 * (u0 + next[0]);
            yp[k + 1] = a1;
            y[k + 1] = y[k] + 0.5 * dt * (a0 + a1);
        }
        u.swap(next);
        for (double& v : u) {
            if (v < 0.0) {
                if (v < -1e-10) ++f.clipped;
                v = 0.0;
            }
        }
        const double err = std::abs(trapezoid_mass(u, dx) - 1.0);
        f.max_mass_error = std::max(f.max_mass_error, err);
        if (err > 1e-3) throw mass_drift_error("PDE: heat mass drifted beyond 1e-3", err);
        trace[k + 1 - start] = u[0];
        if ((k + 1 - start) % stride == 0 || k + 1 == N) store(k + 1);
    }
    f.y = SampledPath(0.0, dt, std::move(y));
    f.yprime = SampledPath(0.0, dt, std::move(yp));
    if (trace.size() < 2) trace.push_back(trace.back());
    f.boundary = SampledPath(f.t_start, dt, std::move(trace));
    return f;
}

}  // namespace detail

/// Grid-density initial data for the PDE, or a point mass for delta laws.
/// Sample files become a histogram on the dx grid.
inline PdeInitial pde_initial(const InitialDistribution& init, double dx, double x_max) {
    using K = InitialDistribution::Kind;
    if (init.kind == K::delta) return PointMass{init.a};
    const auto nodes = static_cast<std::size_t>(std::ceil(x_max / dx - 1e-9)) + 1;
    std::vector<double> w(nodes, 0.0);
    for (std::size_t j = 0; j + 1 < nodes; ++j) {
        const double x = static_cast<double>(j) * dx;
        switch (init.kind) {
            case K::uniform: w[j] = (x >= init.a && x <= init.b) ? 1.0 / (init.b - init.a) : 0.0; break;
            case K::exponential: w[j] = init.a * std::exp(-init.a * x); break;
            case K::half_normal: w[j] = 2.0 * detail::gauss(x, init.a * init.a); break;
            default: break;
        }
    }
    if (init.kind == K::sample_file) {
        const auto s = read_samples(init.path);
        if (s.empty()) throw invalid_input("sample file is empty");
        for (double v : s) {
            const auto j = static_cast<std::size_t>(std::llround(v / dx));
            if (j + 1 < nodes) w[j] += 1.0;
        }
    }
    return GridDensity(0.0, dx, std::move(w));
}

/// Support extent used for the default far boundary.
inline double initial_extent(const PdeInitial& init) {
    if (const auto* pm = std::get_if<PointMass>(&init)) return pm->x0;
    const auto& d = std::get<GridDensity>(init);
    std::size_t last = 0;
    for (std::size_t j = 0; j < d.size(); ++j)
        if (d.weights()[j] > 0.0) last = j;
    return d.x(last);
}

/// Free-boundary heat problem in the barrier frame:
///   u_t = u_xx / 2 + y' u_x,  u_x(t, 0) = -2 y' u(t, 0),  y'' = -(K/2) u(t, 0),
/// Crank-Nicolson in space-time, trapezoidal predictor-corrector for (y, y').
inline DensityField solve_limit_pde(const PdeInitial& init, const PdeParams& p) {
    const double x_max = p.x_max > 0.0 ? p.x_max : default_x_max(initial_extent(init), p.T, p.v0);
    return detail::run_heat(init, p.T, p.dt, p.dx, x_max, p.max_rows, {false, p.v0, p.K, nullptr});
}

inline DensityField solve_limit_pde(const GridDensity& init, double v0, double K, double T, double dt_pde,
                                    double dx, double x_max = 0.0) {
    return solve_limit_pde(PdeInitial{init}, PdeParams{v0, K, T, dt_pde, dx, x_max, 200});
}

/// Density of Brownian motion reflected from a prescribed barrier g (g(0) = 0),
/// same scheme without back-reaction. `K_label` is recorded for consistency_check.
inline DensityField density_fixed_barrier(const SampledPath& g, const PdeInitial& init, double T, double dt_pde,
                                          double dx, double x_max = 0.0, double K_label = 0.0) {
    if (std::abs(g[0]) > 1e-12 || g.t0() != 0.0) throw invalid_input("density_fixed_barrier: need g(0) = 0");
    if (g.t_end() < T * (1.0 - 1e-12)) throw invalid_input("density_fixed_barrier: g does not cover [0, T]");
    double drift = 0.0;
    for (std::size_t k = 1; k < g.size(); ++k) drift = std::max(drift, std::abs(g[k] - g[k - 1]) / g.dt());
    const double xm = x_max > 0.0 ? x_max : default_x_max(initial_extent(init), T, drift);
    detail::BarrierSpec bs{true, (g.at(dt_pde) - g[0]) / dt_pde, K_label, &g};
    return detail::run_heat(init, T, dt_pde, dx, xm, 200, bs);
}

struct ConsistencyReport {
    double max_residual = 0.0;
    double scale = 0.0;      ///< dt_pde + dx^2
    double threshold = 0.0;
    bool free_boundary = true;  ///< false: "not a free-boundary solution"
};

/// Consistency factor: residuals above kConsistencyFactor (dt + dx^2) are flagged.
inline constexpr double kConsistencyFactor = 1.0;

/// Checks y'(t) = v0 - (K/2) int_0^t u(s, 0) ds along the stored barrier, with
/// the boundary integral taken by composite Simpson (independent of the
/// trapezoidal update inside the solver).
inline ConsistencyReport consistency_check(const DensityField& f) {
    ConsistencyReport r;
    const double dt = f.yprime.dt();
    r.scale = dt + f.dx * f.dx;
    r.threshold = kConsistencyFactor * r.scale;
    const auto& b = f.boundary;
    const std::size_t start = static_cast<std::size_t>(std::llround(f.t_start / dt));
    auto simpson = [&](std::size_t lo, std::size_t hi) {  // even number of intervals
        double s = 0.0;
        for (std::size_t i = lo; i < hi; i += 2) s += b[i] + 4.0 * b[i + 1] + b[i + 2];
        return s * dt / 3.0;
    };
    const std::size_t steps = f.yprime.steps();
    for (std::size_t k = start; k <= steps; ++k) {
        const std::size_t m = k - start;
        double integral = 0.0;
        if (m == 1) integral = 0.5 * dt * (b[0] + b[1]);
        else if (m % 2 == 0) integral = simpson(0, m);
        else integral = simpson(0, m - 3) + 3.0 * dt / 8.0 * (b[m - 3] + 3.0 * b[m - 2] + 3.0 * b[m - 1] + b[m]);
        const double res =
            std::abs(f.yprime[k] - f.v0 + 0.5 * f.K * (f.initial_boundary_integral + integral));
        r.max_residual = std::max(r.max_residual, res);
    }
    r.free_boundary = r.max_residual <= r.threshold;
    return r;
}

}  // namespace inert
