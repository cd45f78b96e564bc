#include <growthlab/commands.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    using growthlab::cli::RunConfig;
    RunConfig cfg;
    CLI::App app{"growthlab: last-passage, polymer and TASEP experiments"};
    app.set_config("--config", "", "INI/TOML file with flat key = value settings");
    app.require_subcommand(1, 1);

    app.add_option("--seed", cfg.seed, "base seed");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--n", cfg.n, "scaling parameter / system size");
    app.add_option("--m", cfg.m, "second size (0: same as n)");
    app.add_option("--mu", cfg.mu, "log-gamma bulk parameter");
    app.add_option("--theta", cfg.theta, "log-gamma boundary parameter");
    app.add_option("--beta", cfg.beta, "inverse temperature");
    app.add_option("--c1", cfg.c1, "rate left of the interface");
    app.add_option("--c2", cfg.c2, "rate right of the interface");
    app.add_option("--rho", cfg.rho, "initial density");
    app.add_option("--s", cfg.s, "first macroscopic coordinate");
    app.add_option("--t", cfg.t, "second macroscopic coordinate / time");
    app.add_option("--horizon", cfg.horizon, "microscopic horizon for the envelope run");
    app.add_option("--reps", cfg.reps, "replicas");
    app.add_option("--x", cfg.x, "shape x coordinates");
    app.add_option("--y", cfg.y, "shape y coordinates");
    app.add_option("--r_min", cfg.r_min, "rate grid start");
    app.add_option("--r_max", cfg.r_max, "rate grid end");
    app.add_option("--r_points", cfg.r_points, "rate grid size");
    app.add_option("--xi", cfg.xi, "Varadhan exponent");
    app.add_option("--tol", cfg.tol, "acceptance tolerance");
    app.add_option("--vtol", cfg.vtol, "Varadhan tolerance");
    app.add_option("--initial", cfg.initial, "bernoulli or step");
    app.add_option("--x_min", cfg.x_min, "window start (macroscopic)");
    app.add_option("--x_max", cfg.x_max, "window end (macroscopic)");
    app.add_option("--bin", cfg.bin, "histogram bin width");
    app.add_option("--zone", cfg.zone, "exclusion zone width at discontinuities");
    app.add_option("--window", cfg.window, "envelope window size in sites");
    app.add_option("--samples", cfg.samples, "envelope sample times");
    app.add_option("--snapshots", cfg.snapshots, "trajectory snapshots");
    app.add_flag("--mismatch", cfg.mismatch, "drive the xi family by different clocks");

    for (const char* name : {"shape", "burke", "rate", "polymer", "tasep", "envelope", "couple", "profile", "entropy"})
        app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : growthlab::cli::exit_error;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    std::string config_text;
    if (const auto* opt = app.get_option("--config"); opt->count() > 0) {
        std::ifstream f(opt->as<std::string>());
        std::ostringstream os;
        os << f.rdbuf();
        config_text = os.str();
    }
    try {
        return growthlab::cli::dispatch(cfg, config_text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return growthlab::cli::exit_error;
    }
}
