#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "inert/error.hpp"
#include "inert/meanfield_mc.hpp"
#include "inert/meanfield_pde.hpp"
#include "inert/particle_sim.hpp"

namespace inert {

/// Flat `key = value` configuration; `#` starts a comment.
///
/// Keys:
///   n, T, dt, K, v0, seed            particle system
///   init.kind, init.params           delta|uniform|exponential|half_normal|sample_file
///                                    and its comma-separated parameters (or file path)
///   M, tol, max_iter, monitoring,    Monte Carlo limit (monitoring = bridge|grid)
///   window
///   dt_pde, dx, x_max                PDE limit (x_max = 0 picks the default)
///   n_list, reps, pair               harness studies (pair is 1-based, e.g. 1,2)
///   l_min, l_max                     gamma-rate levels
///   snapshots                        comma-separated snapshot times for simulate
class Config {
public:
    static const std::set<std::string>& known_keys() {
        static const std::set<std::string> k{"n",        "T",        "dt",        "K",       "v0",    "seed",
                                             "init.kind", "init.params", "M",     "tol",     "max_iter",
                                             "monitoring", "window",  "dt_pde",    "dx",      "x_max", "n_list",
                                             "reps",     "pair",     "l_min",     "l_max",   "snapshots"};
        return k;
    }

    static Config parse(std::istream& in, const std::string& origin = "config") {
        Config c;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
            const std::string t = trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw invalid_input(origin + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
            if (!known_keys().count(key))
                throw invalid_input(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
            if (value.empty()) throw invalid_input(origin + ":" + std::to_string(lineno) + ": empty value for " + key);
            c.kv_[key] = value;
        }
        return c;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw invalid_input("cannot open config file: " + path);
        return parse(in, path);
    }

    static Config from_string(const std::string& s) {
        std::istringstream in(s);
        return parse(in);
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    double real(const std::string& key, double fallback) const {
        return has(key) ? to_real(key, kv_.at(key)) : fallback;
    }

    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        return to_u64(key, kv_.at(key));
    }

    std::string str(const std::string& key, const std::string& fallback) const {
        return has(key) ? kv_.at(key) : fallback;
    }

    std::vector<double> reals(const std::string& key) const {
        std::vector<double> out;
        if (!has(key)) return out;
        for (const auto& p : split(kv_.at(key))) out.push_back(to_real(key, p));
        return out;
    }

    std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> fallback) const {
        if (!has(key)) return fallback;
        std::vector<std::size_t> out;
        for (const auto& p : split(kv_.at(key))) out.push_back(static_cast<std::size_t>(to_u64(key, p)));
        return out;
    }

    InitialDistribution initial() const {
        const std::string kind = str("init.kind", "delta");
        const std::string params = str("init.params", "");
        auto nums = [&](std::size_t need) {
            std::vector<double> v;
            if (!params.empty())
                for (const auto& p : split(params)) v.push_back(to_real("init.params", p));
            if (v.size() != need)
                throw invalid_input("init.params: " + kind + " takes " + std::to_string(need) + " value(s)");
            return v;
        };
        if (kind == "delta") return InitialDistribution::delta(params.empty() ? 0.0 : nums(1)[0]);
        if (kind == "uniform") {
            const auto v = nums(2);
            return InitialDistribution::uniform(v[0], v[1]);
        }
        if (kind == "exponential") return InitialDistribution::exponential(nums(1)[0]);
        if (kind == "half_normal") return InitialDistribution::half_normal(nums(1)[0]);
        if (kind == "sample_file") return InitialDistribution::sample_file(params);
        throw invalid_input("init.kind: unknown kind '" + kind + "'");
    }

    SimConfig sim(std::uint64_t seed) const {
        SimConfig s;
        s.n = static_cast<std::size_t>(u64("n", 1000));
        s.T = real("T", 1.0);
        s.dt = real("dt", 1e-3);
        s.K = real("K", 1.0);
        s.v0 = real("v0", 0.0);
        s.init = initial();
        s.seed = seed;
        s.validate();
        return s;
    }

    LimitMcParams mc(std::uint64_t seed) const {
        LimitMcParams p;
        p.v0 = real("v0", 0.0);
        p.K = real("K", 1.0);
        p.T = real("T", 1.0);
        p.dt = real("dt", 1e-3);
        p.M = static_cast<std::size_t>(u64("M", 10000));
        p.seed = seed;
        p.tol = real("tol", 1e-4);
        p.max_iter = static_cast<std::size_t>(u64("max_iter", 100));
        p.window = real("window", 0.0);
        const std::string mon = str("monitoring", "bridge");
        if (mon == "bridge") p.monitoring = Monitoring::bridge;
        else if (mon == "grid") p.monitoring = Monitoring::grid;
        else throw invalid_input("monitoring: expected bridge or grid");
        return p;
    }

    PdeParams pde() const {
        PdeParams p;
        p.v0 = real("v0", 0.0);
        p.K = real("K", 1.0);
        p.T = real("T", 1.0);
        p.dt = real("dt_pde", 2.5e-5);
        p.dx = real("dx", 5e-3);
        p.x_max = real("x_max", 0.0);
        return p;
    }

    /// 0-based particle pair from the 1-based `pair` key.
    std::pair<std::size_t, std::size_t> pair() const {
        const auto v = counts("pair", {1, 2});
        if (v.size() != 2 || v[0] == 0 || v[1] == 0) throw invalid_input("pair: expected two 1-based indices");
        return {v[0] - 1, v[1] - 1};
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(s);
        while (std::getline(in, item, ',')) out.push_back(trim(item));
        return out;
    }

    static double to_real(const std::string& key, const std::string& s) {
        double v = 0.0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v))
            throw invalid_input(key + ": not a number: '" + s + "'");
        return v;
    }

    static std::uint64_t to_u64(const std::string& key, const std::string& s) {
        std::uint64_t v = 0;
        const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
            throw invalid_input(key + ": not a nonnegative integer: '" + s + "'");
        return v;
    }

    std::map<std::string, std::string> kv_;
};

}  // namespace inert
