#pragma once

#include <growthlab/env.hpp>
#include <growthlab/errors.hpp>
#include <growthlab/hydro.hpp>
#include <growthlab/lattice.hpp>
#include <growthlab/loggamma.hpp>
#include <growthlab/mc.hpp>
#include <growthlab/tasep.hpp>

#include <json.hpp>
#include <openssl/sha.h>

#include <boost/math/special_functions/gamma.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace growthlab::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_threshold = 2;

struct RunConfig {
    std::string subcommand;
    int n = 100;
    int m = 0;  // 0 means m = n
    double mu = 2.0;
    double theta = 1.0;
    double beta = 1.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double rho = 0.3;
    double s = 1.0;
    double t = 1.0;
    double horizon = 30.0;
    std::size_t reps = 100;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::vector<double> x{1.0};
    std::vector<double> y{1.0};
    double r_min = NAN, r_max = NAN;
    int r_points = 31;
    double xi = 0.0;
    double tol = 0.05;
    double vtol = 0.1;
    std::string initial = "bernoulli";
    double x_min = -1.0, x_max = 0.7, bin = 0.1, zone = 0.05;
    int window = 40;
    int samples = 100;
    int snapshots = 5;
    bool mismatch = false;

    int m_or_n() const { return m > 0 ? m : n; }

    nlohmann::json to_json() const {
        return {{"subcommand", subcommand}, {"n", n}, {"m", m}, {"mu", mu}, {"theta", theta}, {"beta", beta},
                {"c1", c1}, {"c2", c2}, {"rho", rho}, {"s", s}, {"t", t}, {"horizon", horizon}, {"reps", reps},
                {"seed", seed}, {"out", out}, {"x", x}, {"y", y},
                {"r_min", std::isnan(r_min) ? nlohmann::json() : nlohmann::json(r_min)},
                {"r_max", std::isnan(r_max) ? nlohmann::json() : nlohmann::json(r_max)},
                {"r_points", r_points}, {"xi", xi}, {"tol", tol}, {"vtol", vtol}, {"initial", initial},
                {"x_min", x_min}, {"x_max", x_max}, {"bin", bin}, {"zone", zone}, {"window", window},
                {"samples", samples}, {"snapshots", snapshots}, {"mismatch", mismatch}};
    }

    /// Flat key = value lines accepted by --config.
    std::string to_ini() const {
        std::ostringstream os;
        os << std::setprecision(17);
        const auto j = to_json();
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() == "subcommand" || it.value().is_null()) continue;
            os << it.key() << " = ";
            if (it.value().is_array()) {
                os << '[';
                for (std::size_t k = 0; k < it.value().size(); ++k) os << (k ? ", " : "") << it.value()[k].get<double>();
                os << ']';
            } else if (it.value().is_string()) {
                os << '"' << it.value().get<std::string>() << '"';
            } else if (it.value().is_number_float()) {
                os << it.value().get<double>();
            } else {
                os << it.value().dump();
            }
            os << '\n';
        }
        return os.str();
    }

    void validate() const {
        auto need = [](bool ok, const std::string& msg) {
            if (!ok) throw ParameterError("config: " + msg);
        };
        need(n >= 1, "n must be >= 1");
        need(m >= 0, "m must be >= 0");
        need(reps >= 1, "reps must be >= 1");
        need(c1 > 0 && c2 > 0, "c1 and c2 must be positive");
        need(tol > 0 && vtol > 0, "tolerances must be positive");
        const std::string& sc = subcommand;
        if (sc == "shape") {
            need(x.size() == y.size() && !x.empty(), "x and y must be nonempty and of equal length");
            for (std::size_t k = 0; k < x.size(); ++k) need(x[k] > 0 && y[k] > 0, "shape points must be positive");
        }
        if (sc == "burke" || sc == "rate" || sc == "polymer") need(mu > 0, "mu must be positive");
        if (sc == "burke") need(theta > 0 && theta < mu, "theta must lie in (0, mu)");
        if (sc == "rate" || sc == "polymer") {
            need(s >= 0 && t >= 0 && (s > 0 || t > 0), "s, t must be >= 0 and not both 0");
            need(r_points >= 2, "r_points must be >= 2");
        }
        if (sc == "polymer") {
            need(beta > 0, "beta must be positive");
            need(xi >= 0 && xi < mu, "xi must lie in [0, mu)");
        }
        if (sc == "tasep" || sc == "profile" || sc == "entropy") {
            need(rho > 0 && rho < 1, "rho must lie in (0,1)");
            need(t > 0, "t must be positive");
        }
        if (sc == "tasep" || sc == "profile") {
            need(x_max > x_min, "x_max must exceed x_min");
            need(bin > 0, "bin must be positive");
            need(initial == "bernoulli" || initial == "step", "initial must be bernoulli or step");
        }
        if (sc == "envelope") {
            need(window >= 3, "window must hold at least 3 sites");
            need(horizon > 0, "horizon must be positive");
            need(samples >= 1, "samples must be >= 1");
        }
    }
};

/// git blob hash (SHA-1 of "blob <len>\0<content>") as lowercase hex.
inline std::string git_blob_hash(const std::string& content) {
    std::string data = "blob " + std::to_string(content.size());
    data.push_back('\0');
    data += content;
    unsigned char md[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
    std::ostringstream os;
    for (unsigned char b : md) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(b);
    return os.str();
}

/// Output directory plus the manifest written at the end of a run.
class Run {
public:
    Run(const RunConfig& cfg, std::string config_text)
        : cfg_(cfg), config_text_(std::move(config_text)), start_(std::chrono::steady_clock::now()) {
        std::filesystem::create_directories(cfg.out);
    }

    std::string path(const std::string& name) {
        outputs_.push_back(name);
        return (std::filesystem::path(cfg_.out) / name).string();
    }

    std::ofstream csv(const std::string& name, const std::string& header) {
        std::ofstream f(path(name));
        if (!f) throw Error("cannot open " + name);
        f << std::setprecision(12) << header << '\n';
        return f;
    }

    nlohmann::json& summary() { return summary_; }

    int finish(int code) {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const std::string ini = cfg_.to_ini();
        {
            std::ofstream f((std::filesystem::path(cfg_.out) / "replay.ini").string());
            f << ini;
        }
        nlohmann::json man = {{"subcommand", cfg_.subcommand},
                              {"config", cfg_.to_json()},
                              {"seed", cfg_.seed},
                              {"input_hash", git_blob_hash(cfg_.to_json().dump() + '\n' + config_text_)},
                              {"wall_time_s", wall},
                              {"outputs", outputs_},
                              {"summary", summary_},
                              {"exit_code", code},
                              {"workers", mc::worker_count()},
                              {"replay", "growthlab " + cfg_.subcommand + " --config " +
                                             (std::filesystem::path(cfg_.out) / "replay.ini").string()}};
        std::ofstream f((std::filesystem::path(cfg_.out) / "manifest.json").string());
        f << man.dump(2) << '\n';
        return code;
    }

private:
    RunConfig cfg_;
    std::string config_text_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> outputs_;
    nlohmann::json summary_ = nlohmann::json::object();
};

inline env::SpeedFunction speed_of(const RunConfig& cfg) {
    return cfg.c1 == cfg.c2 ? env::SpeedFunction::constant(cfg.c1) : env::SpeedFunction::two_phase(cfg.c1, cfg.c2);
}

/// n^-1 G(floor(nx), floor(ny)) of the two-phase corner growth model; an empty rectangle gives 0.
inline double corner_passage(const env::SpeedFunction& c, int n, double x, double y, const env::RngSpec& r) {
    const int M = static_cast<int>(std::floor(n * x)), N = static_cast<int>(std::floor(n * y));
    if (M < 1 || N < 1) return 0.0;
    const auto w = [&](int i, int j) {
        return env::exponential_weight(r, env::exponential_rate(c, n, 0, env::Region::Kind::rectangle, i, j), i, j);
    };
    return lattice::last_passage_value(M - 1, N - 1, w, true) / n;
}

inline int cmd_shape(const RunConfig& cfg, Run& run) {
    const auto c = speed_of(cfg);
    auto mc_csv = run.csv("shape_mc.csv", "x,y,n,estimate,stderr,closed_form,abs_err");
    auto sh_csv = run.csv("shape.csv", "x,y,phi_closed_form,gamma_q_numeric");
    bool ok = true;
    for (std::size_t k = 0; k < cfg.x.size(); ++k) {
        const double x = cfg.x[k], y = cfg.y[k];
        const double phi = cfg.c1 >= cfg.c2 ? hydro::two_phase_shape(x, y, cfg.c1, cfg.c2) : NAN;
        const double gq = hydro::gamma_q(x - y, y, 0.0, c);
        const double closed = std::isnan(phi) ? gq : phi;
        const auto e = mc::run_replicas([&](const env::RngSpec& r) { return corner_passage(c, cfg.n, x, y, r); }, cfg.reps,
                                        env::mix(cfg.seed, k));
        const double err = std::abs(e.mean - closed);
        ok = ok && err <= cfg.tol * closed;
        mc_csv << x << ',' << y << ',' << cfg.n << ',' << e.mean << ',' << e.std_error << ',' << closed << ',' << err << '\n';
        sh_csv << x << ',' << y << ',' << phi << ',' << gq << '\n';
        std::cout << "shape (" << x << ", " << y << "): estimate " << e.mean << " +- " << e.std_error << ", closed form "
                  << closed << ", relative error " << err / closed << '\n';
    }
    run.summary()["pass"] = ok;
    return ok ? exit_ok : exit_threshold;
}

inline double inverse_gamma_cdf(double shape, double u) { return u > 0 ? boost::math::gamma_q(shape, 1.0 / u) : 0.0; }

inline int cmd_burke(const RunConfig& cfg, Run& run) {
    const int m = cfg.m_or_n(), n = cfg.n;
    const loggamma::LogGammaParams p{cfg.mu, cfg.theta};
    p.validate();
    const double ref = loggamma::stationary_mean_logZ(m, n, p);
    const auto e = mc::run_replicas(
        [&](const env::RngSpec& r) {
            return lattice::log_partition_value(
                m, n, [&](int i, int j) { return env::loggamma_weight(r, cfg.mu, cfg.theta, true, i, j); }, 1.0, true);
        },
        cfg.reps, cfg.seed);
    const auto grid = env::sample_loggamma_grid(cfg.mu, cfg.theta, m, n, true, {cfg.seed, 0});
    const auto f = lattice::log_partition(grid, 1.0, true);
    std::vector<double> U, V;
    for (int i = 1; i <= m; ++i) U.push_back(std::exp(f.at(i, n) - f.at(i - 1, n)));
    for (int j = 1; j <= n; ++j) V.push_back(std::exp(f.at(m, j) - f.at(m, j - 1)));
    const auto ksU = mc::ks_test(U, [&](double u) { return inverse_gamma_cdf(cfg.theta, u); });
    const auto ksV = mc::ks_test(V, [&](double v) { return inverse_gamma_cdf(cfg.mu - cfg.theta, v); });
    const bool mean_ok = std::abs(e.mean - ref) <= 3.0 * e.std_error;
    const bool ok = mean_ok && ksU.p_value > 0.01 && ksV.p_value > 0.01;
    auto out = run.csv("burke.csv", "statistic,value,stderr,reference,pass");
    out << "mean_logZ," << e.mean << ',' << e.std_error << ',' << ref << ',' << mean_ok << '\n';
    out << "ks_U_top_row," << ksU.statistic << ",," << ksU.p_value << ',' << (ksU.p_value > 0.01) << '\n';
    out << "ks_V_right_column," << ksV.statistic << ",," << ksV.p_value << ',' << (ksV.p_value > 0.01) << '\n';
    std::cout << "burke: mean log Z " << e.mean << " +- " << e.std_error << " vs " << ref << "; KS p(U) " << ksU.p_value
              << ", KS p(V) " << ksV.p_value << '\n';
    run.summary()["pass"] = ok;
    return ok ? exit_ok : exit_threshold;
}

inline int cmd_rate(const RunConfig& cfg, Run& run) {
    const double p = loggamma::free_energy(cfg.s, cfg.t, cfg.mu);
    const double lo = std::isnan(cfg.r_min) ? p - 0.5 : cfg.r_min;
    const double hi = std::isnan(cfg.r_max) ? p + 1.0 : cfg.r_max;
    std::vector<double> rs = convex::linspace(lo, hi, cfg.r_points);
    rs.push_back(p);
    std::sort(rs.begin(), rs.end());
    auto rate = run.csv("rate.csv", "s,t,r,J,p_mu,mu");
    bool ok = true;
    const bool interior = cfg.s > 0 && cfg.t > 0;
    std::optional<loggamma::PointRate> J;
    if (interior) J.emplace(cfg.s, cfg.t, cfg.mu);
    for (double r : rs) {
        const double v = interior ? (*J)(r) : loggamma::point_rate(cfg.s, cfg.t, r, cfg.mu);
        ok = ok && v >= 0 && (r > p || v <= 1e-12);
        rate << cfg.s << ',' << cfg.t << ',' << r << ',' << v << ',' << p << ',' << cfg.mu << '\n';
    }
    auto dual = run.csv("dual.csv", "s,t,xi,J_star");
    for (double xi : convex::linspace(0.0, 0.9 * cfg.mu, 19))
        dual << cfg.s << ',' << cfg.t << ',' << xi << ',' << loggamma::dual_rate(cfg.s, cfg.t, xi, cfg.mu) << '\n';
    std::cout << "rate: p_mu(" << cfg.s << ", " << cfg.t << ") = " << p << "; J vanishes up to p and is nonnegative: "
              << (ok ? "PASS" : "FAIL") << '\n';
    run.summary()["pass"] = ok;
    run.summary()["free_energy"] = p;
    return ok ? exit_ok : exit_threshold;
}

inline int cmd_polymer(const RunConfig& cfg, Run& run) {
    const int M = static_cast<int>(std::lround(cfg.n * cfg.s)), N = static_cast<int>(std::lround(cfg.n * cfg.t));
    const auto logZ = mc::map_replicas(
        [&](const env::RngSpec& r) {
            return lattice::log_partition_value(
                M, N, [&](int i, int j) { return env::loggamma_weight(r, cfg.mu, 0.0, false, i, j); }, cfg.beta, true);
        },
        cfg.reps, cfg.seed);
    std::vector<double> per_n;
    for (double z : logZ) per_n.push_back(z / cfg.n);
    const auto e = mc::summarize(per_n, cfg.seed);
    auto out = run.csv("polymer.csv", "quantity,n,estimate,stderr,reference,abs_err");
    bool ok = true;
    if (cfg.beta == 1.0) {
        const double p = loggamma::free_energy(cfg.s, cfg.t, cfg.mu);
        const double err = std::abs(e.mean - p);
        ok = ok && err <= cfg.tol;
        out << "free_energy," << cfg.n << ',' << e.mean << ',' << e.std_error << ',' << p << ',' << err << '\n';
        std::cout << "polymer: n^-1 log Z " << e.mean << " +- " << e.std_error << " vs p_mu " << p << '\n';
    } else {
        out << "free_energy," << cfg.n << ',' << e.mean << ',' << e.std_error << ",,\n";
        std::cout << "polymer: n^-1 log Z at beta " << cfg.beta << ": " << e.mean << " +- " << e.std_error << '\n';
    }
    if (cfg.xi > 0 && cfg.beta == 1.0) {
        double acc = lattice::neg_inf;
        for (double z : logZ) acc = lattice::logsumexp(acc, cfg.xi * z);
        const double est = (acc - std::log(static_cast<double>(logZ.size()))) / cfg.n;
        const double ref = loggamma::dual_rate(cfg.s, cfg.t, cfg.xi, cfg.mu);
        const double err = std::abs(est - ref);
        ok = ok && err <= cfg.vtol;
        out << "varadhan," << cfg.n << ',' << est << ",," << ref << ',' << err << '\n';
        std::cout << "polymer: n^-1 log E exp(xi log Z) " << est << " vs J* " << ref << '\n';
    }
    run.summary()["pass"] = ok;
    return ok ? exit_ok : exit_threshold;
}

inline int cmd_tasep(const RunConfig& cfg, Run& run) {
    tasep::TasepConfig tc;
    tc.c = speed_of(cfg);
    tc.n = cfg.n;
    tc.initial = cfg.initial == "step" ? tasep::InitialCondition::step(0) : tasep::InitialCondition::bernoulli(cfg.rho);
    tc.horizon = cfg.n * cfg.t;
    tc.window_lo = static_cast<long>(std::floor(cfg.x_min * cfg.n));
    tc.window_hi = static_cast<long>(std::ceil(cfg.x_max * cfg.n));
    tc.rng = {cfg.seed, 0};
    for (int k = 0; k < cfg.snapshots; ++k) tc.sample_times.push_back(tc.horizon * k / std::max(cfg.snapshots, 1));
    const auto tr = tasep::simulate(tc);
    auto traj = run.csv("trajectory.csv", "t,i,eta,z,J");
    for (const auto& s : tr.snapshots)
        for (long i = s.i_min; i <= s.i_max; ++i)
            traj << s.time << ',' << i << ',' << s.eta_at(i) << ',' << s.z_at(i) << ',' << s.J_at(i) << '\n';
    std::vector<double> edges;
    const int nb = static_cast<int>(std::lround((cfg.x_max - cfg.x_min) / cfg.bin));
    for (int b = 0; b <= nb; ++b) edges.push_back(cfg.x_min + b * cfg.bin);
    auto hist = run.csv("histogram.csv", "bin_lo,bin_hi,density");
    for (const auto& b : tasep::density_histogram(tr.snapshots.back(), cfg.n, edges))
        hist << b.lo << ',' << b.hi << ',' << b.density << '\n';
    std::cout << "tasep: " << tr.rings << " rings, " << tr.jumps << " jumps, domain [" << tr.domain_lo << ", "
              << tr.domain_hi << "]\n";
    run.summary()["rings"] = tr.rings;
    run.summary()["jumps"] = tr.jumps;
    return exit_ok;
}

inline int cmd_envelope(const RunConfig& cfg, Run& run) {
    tasep::EnvelopeConfig ec;
    ec.c = speed_of(cfg);
    ec.n = cfg.n;
    ec.window_lo = -cfg.window / 2;
    ec.window_hi = ec.window_lo + cfg.window - 1;
    ec.horizon = cfg.horizon;
    ec.samples = cfg.samples;
    ec.rng = {cfg.seed, 0};
    if (cfg.mismatch) ec.xi_rng = env::RngSpec{env::mix(cfg.seed, 0x6d69), 0};
    const auto rep = tasep::run_envelope(ec);
    auto out = run.csv("envelope.csv", "time,site,z,envelope,argmax_k");
    for (const auto& v : rep.violations)
        out << v.time << ',' << v.site << ',' << v.z << ',' << v.envelope << ',' << v.argmax_k << '\n';
    std::cout << "envelope: " << rep.checks << " checks, " << rep.window_jumps << " jumps in the window, "
              << rep.violations.size() << " violations\n";
    std::cout << "exact equality: " << (rep.pass ? "PASS" : "FAIL") << '\n';
    run.summary()["pass"] = rep.pass;
    run.summary()["checks"] = rep.checks;
    run.summary()["window_jumps"] = rep.window_jumps;
    return rep.pass ? exit_ok : exit_threshold;
}

inline int cmd_couple(const RunConfig& cfg, Run& run) {
    const int m = cfg.m_or_n(), n = cfg.n;
    const auto rep = tasep::lpp_coupling_check(m, n, cfg.reps, cfg.seed);
    auto out = run.csv("coupling.csv", "side,mean,stderr,reps");
    out << "last_passage," << rep.lpp.mean << ',' << rep.lpp.std_error << ',' << rep.lpp.reps << '\n';
    out << "tasep," << rep.tasep.mean << ',' << rep.tasep.std_error << ',' << rep.tasep.reps << '\n';
    std::cout << "couple (" << m << ", " << n << "): KS p " << rep.ks.p_value << ", mean difference " << rep.mean_diff
              << " (pooled stderr " << rep.pooled_se << "): " << (rep.pass ? "PASS" : "FAIL") << '\n';
    run.summary()["pass"] = rep.pass;
    run.summary()["ks_p"] = rep.ks.p_value;
    return rep.pass ? exit_ok : exit_threshold;
}

inline int cmd_profile(const RunConfig& cfg, Run& run) {
    tasep::ProfileExperiment ex;
    ex.c1 = cfg.c1;
    ex.c2 = cfg.c2;
    ex.rho = cfg.rho;
    ex.t = cfg.t;
    ex.n = cfg.n;
    ex.reps = cfg.reps;
    ex.x_min = cfg.x_min;
    ex.x_max = cfg.x_max;
    ex.bin = cfg.bin;
    ex.zone = cfg.zone;
    ex.seed = cfg.seed;
    const auto cmp = tasep::compare_profile(ex);
    auto prof = run.csv("profile.csv", "x,t,rho_closed_form");
    for (double x : convex::linspace(cfg.x_min, cfg.x_max, 341))
        prof << x << ',' << cfg.t << ',' << hydro::two_phase_profile(cfg.rho, cfg.c1, cfg.c2, x, cfg.t) << '\n';
    auto hist = run.csv("histogram.csv", "bin_lo,bin_hi,density");
    auto comp = run.csv("comparison.csv", "bin_lo,bin_hi,empirical,closed_form,abs_err,sites");
    for (const auto& b : cmp.bins) {
        hist << b.lo << ',' << b.hi << ',' << b.empirical << '\n';
        comp << b.lo << ',' << b.hi << ',' << b.empirical << ',' << b.closed_form << ','
             << std::abs(b.empirical - b.closed_form) << ',' << b.sites << '\n';
    }
    const bool ok = cmp.max_abs_err <= cfg.tol;
    std::cout << "profile: max binned |empirical - closed form| = " << cmp.max_abs_err << " over " << cmp.bins.size()
              << " bins: " << (ok ? "PASS" : "FAIL") << '\n';
    run.summary()["pass"] = ok;
    run.summary()["max_abs_err"] = cmp.max_abs_err;
    return ok ? exit_ok : exit_threshold;
}

inline int cmd_entropy(const RunConfig& cfg, Run& run) {
    auto prof = [&](double x) { return hydro::two_phase_profile(cfg.rho, cfg.c1, cfg.c2, x, cfg.t); };
    const auto rep = hydro::entropy_check(prof, cfg.c1, cfg.c2, cfg.t);
    std::ofstream out(run.path("entropy.txt"));
    out << std::setprecision(12);
    auto line = [&](const std::string& name, bool pass, const std::string& detail) {
        out << name << ": " << (pass ? "PASS" : "FAIL") << (detail.empty() ? "" : " (" + detail + ")") << '\n';
        std::cout << name << ": " << (pass ? "PASS" : "FAIL") << '\n';
    };
    bool ok = rep.pass();
    out << "c1 = " << cfg.c1 << ", c2 = " << cfg.c2 << ", rho = " << cfg.rho << ", t = " << cfg.t << '\n';
    out << "rho(0-) = " << rep.rho_left << ", rho(0+) = " << rep.rho_right << '\n';
    line("interior (E_i)", rep.interior, std::to_string(rep.jumps.size()) + " jumps away from 0");
    line("boundary (E_b)", rep.boundary, "");
    std::ostringstream fr;
    fr << std::setprecision(3) << rep.flux_residual;
    line("flux matching", rep.flux_match, "residual " + fr.str());
    auto pxt = [&](double x, double t) { return hydro::two_phase_profile(cfg.rho, cfg.c1, cfg.c2, x, t); };
    auto p0 = [&](double) { return cfg.rho; };
    int k = 0;
    for (const auto& b : hydro::standard_bumps(cfg.c1, cfg.c2, cfg.t)) {
        const auto w = hydro::weak_solution_residual(pxt, p0, cfg.c1, cfg.c2, b);
        const bool pass = std::abs(w.value) <= 1e-3;
        ok = ok && pass;
        std::ostringstream d;
        d << std::setprecision(3) << "residual " << w.value << (w.shock_warning ? ", cells split at discontinuities" : "");
        line("weak form, bump " + std::to_string(++k), pass, d.str());
    }
    for (const auto& v : rep.violations) out << "violation: " << v << '\n';
    run.summary()["pass"] = ok;
    run.summary()["flux_residual"] = rep.flux_residual;
    return ok ? exit_ok : exit_threshold;
}

inline int dispatch(const RunConfig& cfg, const std::string& config_text) {
    cfg.validate();
    Run run(cfg, config_text);
    int code = exit_error;
    const std::string& sc = cfg.subcommand;
    if (sc == "shape") code = cmd_shape(cfg, run);
    else if (sc == "burke") code = cmd_burke(cfg, run);
    else if (sc == "rate") code = cmd_rate(cfg, run);
    else if (sc == "polymer") code = cmd_polymer(cfg, run);
    else if (sc == "tasep") code = cmd_tasep(cfg, run);
    else if (sc == "envelope") code = cmd_envelope(cfg, run);
    else if (sc == "couple") code = cmd_couple(cfg, run);
    else if (sc == "profile") code = cmd_profile(cfg, run);
    else if (sc == "entropy") code = cmd_entropy(cfg, run);
    else throw ParameterError("unknown subcommand " + sc);
    return run.finish(code);
}

} // namespace growthlab::cli
