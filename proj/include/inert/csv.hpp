#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "inert/error.hpp"
#include "inert/harness.hpp"
#include "inert/meanfield_mc.hpp"
#include "inert/meanfield_pde.hpp"
#include "inert/particle_sim.hpp"

namespace inert::csv {

/// Shortest round-trip decimal form, so equal doubles always print equally.
inline std::string num(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline std::string num(std::size_t x) { return std::to_string(x); }

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw invalid_input("cannot write " + path.string());
    }

    template <class... Cols>
    void row(const Cols&... cols) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cols), first = false), ...);
        out_ << '\n';
    }

    void line(const std::string& s) { out_ << s << '\n'; }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(double x) { return num(x); }
    static std::string cell(std::size_t x) { return num(x); }
    static std::string cell(int x) { return std::to_string(x); }

    std::ofstream out_;
};

/// `t,Y,V,X1..Xk` for the first k <= 32 particle paths.
inline void write_trajectory(const std::filesystem::path& path, const BarrierTrajectory& b,
                             std::span<const std::vector<double>> particles) {
    const std::size_t k = std::min<std::size_t>(particles.size(), 32);
    Writer w(path);
    std::string head = "t,Y,V";
    for (std::size_t i = 1; i <= k; ++i) head += ",X" + std::to_string(i);
    w.line(head);
    for (std::size_t s = 0; s < b.y.size(); ++s) {
        std::string l = num(b.y.time(s)) + "," + num(b.y[s]) + "," + num(b.v[s]);
        for (std::size_t i = 0; i < k; ++i) l += "," + num(particles[i][s]);
        w.line(l);
    }
}

inline void write_trajectory(const std::filesystem::path& path, const ParticleSystemTrajectory& tr) {
    std::vector<std::vector<double>> xs;
    for (std::size_t i = 0; i < std::min<std::size_t>(tr.particles.size(), 32); ++i) xs.push_back(tr.particles[i].data());
    write_trajectory(path, tr.barrier, xs);
}

/// `t,atom_index,position`, atoms in sorted order.
inline void write_snapshots(const std::filesystem::path& path,
                            std::span<const std::pair<double, EmpiricalMeasure>> snaps) {
    Writer w(path);
    w.line("t,atom_index,position");
    for (const auto& [t, m] : snaps)
        for (std::size_t i = 0; i < m.size(); ++i) w.row(t, i, m[i]);
}

/// `t,x,u` in long format over the stored rows.
inline void write_density(const std::filesystem::path& path, const DensityField& f) {
    Writer w(path);
    w.line("t,x,u");
    for (std::size_t r = 0; r < f.u.size(); ++r)
        for (std::size_t j = 0; j < f.u[r].size(); ++j) w.row(f.times[r], static_cast<double>(j) * f.dx, f.u[r][j]);
}

/// `t,y,yprime` on the full step grid.
inline void write_pde_barrier(const std::filesystem::path& path, const DensityField& f) {
    Writer w(path);
    w.line("t,y,yprime");
    for (std::size_t k = 0; k < f.y.size(); ++k) w.row(f.y.time(k), f.y[k], f.yprime[k]);
}

/// `t,y,v`.
inline void write_limit_barrier(const std::filesystem::path& path, const LimitBarrier& b) {
    Writer w(path);
    w.line("t,y,v");
    for (std::size_t k = 0; k < b.y.size(); ++k) w.row(b.y.time(k), b.y[k], b.v[k]);
}

/// `n,mean_w1,sd_w1,mean_supY,sd_supY`.
inline void write_hydro(const std::filesystem::path& path, const HydroTable& t) {
    Writer w(path);
    w.line("n,mean_w1,sd_w1,mean_supY,sd_supY");
    for (const auto& r : t.rows) w.row(r.n, r.mean_w1, r.sd_w1, r.mean_supY, r.sd_supY);
}

/// `n,corr,ci_halfwidth`.
inline void write_chaos(const std::filesystem::path& path, const ChaosTable& t) {
    Writer w(path);
    w.line("n,corr,ci_halfwidth");
    for (const auto& r : t.rows) w.row(r.n, r.corr, r.ci_halfwidth);
}

/// `l,eps,measured,bound`.
inline void write_gamma_rate(const std::filesystem::path& path, const GammaRateTable& t) {
    Writer w(path);
    w.line("l,eps,measured,bound");
    for (const auto& r : t.rows) w.row(r.level, r.eps, r.measured, r.bound);
}

}  // namespace inert::csv
