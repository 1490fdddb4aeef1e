#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <tbb/global_control.h>

#include "inert/inert.hpp"

namespace fs = std::filesystem;
using namespace inert;

namespace {

struct Options {
    std::string config;
    std::uint64_t seed = 1;
    std::string out = "inert_out";
    bool quiet = false;
    std::size_t threads = 0;
};

Config load_config(const Options& o) { return o.config.empty() ? Config{} : Config::load(o.config); }

fs::path out_dir(const Options& o) {
    fs::path p(o.out);
    fs::create_directories(p);
    return p;
}

void say(const Options& o, const std::string& s) {
    if (!o.quiet) std::cout << s << '\n';
}

int cmd_simulate(const Options& o) {
    const Config c = load_config(o);
    const SimConfig cfg = c.sim(o.seed);
    std::vector<double> times = c.reals("snapshots");
    if (times.empty()) times.push_back(cfg.T);
    std::set<std::size_t> steps;
    for (double t : times) steps.insert(grid_index(t, cfg.dt, cfg.steps()));
    const auto run = simulate_streaming(cfg, steps, 32);
    const auto dir = out_dir(o);
    csv::write_trajectory(dir / "trajectory.csv", run.barrier, run.tracked);
    std::vector<std::pair<double, EmpiricalMeasure>> snaps;
    for (const auto& [k, m] : run.snapshots) snaps.emplace_back(static_cast<double>(k) * cfg.dt, m);
    csv::write_snapshots(dir / "snapshots.csv", snaps);
    say(o, "Y(T) = " + csv::num(run.barrier.y.back()) + ", V(T) = " + csv::num(run.barrier.v.back()));
    return 0;
}

int cmd_limit_mc(const Options& o) {
    const Config c = load_config(o);
    const auto b = solve_limit_mc(c.initial(), c.mc(o.seed));
    csv::write_limit_barrier(out_dir(o) / "limit_mc.csv", b);
    say(o, "y(T) = " + csv::num(b.y.back()) + ", iterations " + std::to_string(b.iterations) + ", windows " +
               std::to_string(b.windows) + ", residual " + csv::num(b.residual));
    return 0;
}

void write_field(const Options& o, const DensityField& f) {
    const auto dir = out_dir(o);
    csv::write_density(dir / "density.csv", f);
    csv::write_pde_barrier(dir / "barrier.csv", f);
}

int cmd_limit_pde(const Options& o) {
    const Config c = load_config(o);
    const PdeParams p = c.pde();
    const double xm = p.x_max > 0.0 ? p.x_max : default_x_max(c.initial().support_extent(), p.T, p.v0);
    PdeParams q = p;
    q.x_max = xm;
    const auto f = solve_limit_pde(pde_initial(c.initial(), p.dx, xm), q);
    write_field(o, f);
    const auto r = consistency_check(f);
    say(o, "y(T) = " + csv::num(f.y.back()) + ", y'(T) = " + csv::num(f.yprime.back()) + ", mass error " +
               csv::num(f.max_mass_error) + ", consistency residual " + csv::num(r.max_residual));
    return 0;
}

int cmd_density(const Options& o) {
    const Config c = load_config(o);
    const PdeParams p = c.pde();
    const auto N = grid_steps(p.T, p.dt);
    const auto g = SampledPath::from_function(0.0, p.dt, N, [&](double t) { return p.v0 * t; });
    const double xm = p.x_max > 0.0 ? p.x_max : default_x_max(c.initial().support_extent(), p.T, p.v0);
    const auto f = density_fixed_barrier(g, pde_initial(c.initial(), p.dx, xm), p.T, p.dt, p.dx, xm);
    write_field(o, f);
    say(o, "mass error " + csv::num(f.max_mass_error));
    return 0;
}

int cmd_hydro(const Options& o) {
    const Config c = load_config(o);
    const SimConfig tmpl = c.sim(o.seed);
    PdeParams p = c.pde();
    p.T = tmpl.T;
    p.x_max = p.x_max > 0.0 ? p.x_max : default_x_max(tmpl.init.support_extent(), p.T, p.v0);
    const auto limit = solve_limit_pde(pde_initial(tmpl.init, p.dx, p.x_max), p);
    const auto t = hydro_convergence(tmpl, c.counts("n_list", {100, 1000, 10000}),
                                     static_cast<std::size_t>(c.u64("reps", 20)), o.seed, limit);
    csv::write_hydro(out_dir(o) / "hydro.csv", t);
    for (const auto& r : t.rows)
        say(o, "n = " + std::to_string(r.n) + ": W1 " + csv::num(r.mean_w1) + " +- " + csv::num(r.sd_w1) +
                   ", sup|Y - y| " + csv::num(r.mean_supY) + " +- " + csv::num(r.sd_supY));
    return 0;
}

int cmd_chaos(const Options& o) {
    const Config c = load_config(o);
    const auto [i, j] = c.pair();
    const auto t = chaos_test(c.sim(o.seed), i, j, c.counts("n_list", {100, 1000, 10000}),
                              static_cast<std::size_t>(c.u64("reps", 100)), o.seed);
    csv::write_chaos(out_dir(o) / "chaos.csv", t);
    if (t.low_reps) std::cerr << "warning: reps < 30, confidence intervals are unreliable\n";
    for (const auto& r : t.rows)
        say(o, "n = " + std::to_string(r.n) + ": corr " + csv::num(r.corr) + " (ci +- " + csv::num(r.ci_halfwidth) + ")");
    return 0;
}

int cmd_gamma_rate(const Options& o) {
    const Config c = load_config(o);
    const int l_min = static_cast<int>(c.u64("l_min", 4));
    const int l_max = static_cast<int>(c.u64("l_max", 13));
    const auto f = brownian_drivers(static_cast<std::size_t>(c.u64("n", 8)), c.real("T", 1.0), l_max, o.seed);
    const auto t = gamma_rate_study(f, c.real("v0", 0.0), c.real("K", 1.0), l_min, l_max);
    csv::write_gamma_rate(out_dir(o) / "gamma_rate.csv", t);
    say(o, "violations " + std::to_string(t.violations) + ", rate per halving " + csv::num(t.rate));
    return t.violations == 0 ? 0 : 2;
}

int cmd_selftest(const Options& o) {
    const auto rep = run_selftest(o.seed);
    for (const auto& ch : rep.checks)
        say(o, ch.name + ": " + std::to_string(ch.violations) + " violation(s) in " + std::to_string(ch.cases) + " case(s)");
    return rep.ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"inert: particles reflecting from an inert barrier, and their mean-field limit"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "key = value configuration file");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--out", o.out, "output directory");
    app.add_flag("--quiet", o.quiet, "suppress summaries");
    app.add_option("--threads", o.threads, "worker thread cap (0 = all)");

    struct Sub {
        const char* name;
        const char* help;
        int (*run)(const Options&);
    };
    const Sub subs[] = {
        {"simulate", "finite-n particle system", cmd_simulate},
        {"limit-mc", "limit barrier by Monte Carlo Picard iteration", cmd_limit_mc},
        {"limit-pde", "limit density and barrier by the moving-frame PDE", cmd_limit_pde},
        {"density", "reflected density for the prescribed barrier y = v0 t", cmd_density},
        {"hydro", "hydrodynamic-limit convergence table", cmd_hydro},
        {"chaos", "propagation-of-chaos correlation table", cmd_chaos},
        {"gamma-rate", "refinement gaps of the epsilon-recursion vs. the Cauchy bound", cmd_gamma_rate},
        {"selftest", "Skorohod and barrier invariant suite", cmd_selftest},
    };
    int (*chosen)(const Options&) = nullptr;
    for (const auto& s : subs) {
        auto* sc = app.add_subcommand(s.name, s.help);
        sc->fallthrough();
        sc->callback([&chosen, fn = s.run] { chosen = fn; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    std::unique_ptr<tbb::global_control> cap;
    if (o.threads > 0) cap = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, o.threads);
    try {
        return chosen(o);
    } catch (const invalid_input& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const numerical_failure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
