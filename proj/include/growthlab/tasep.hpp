#pragma once

#include <growthlab/env.hpp>
#include <growthlab/errors.hpp>
#include <growthlab/hydro.hpp>
#include <growthlab/lattice.hpp>
#include <growthlab/mc.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace growthlab::tasep {

using env::CounterRng;
using env::RngSpec;
using env::SpeedFunction;

/// Poisson ring times of every site, site i ringing at rate c(i/n). Each site owns an independent
/// counter-based stream, so any number of processes can read the same clocks.
struct ClockStream {
    SpeedFunction c = SpeedFunction::constant(1.0);
    int n = 1;
    RngSpec rng;

    double rate(long site) const { return c(static_cast<double>(site) / n); }

    struct Cursor {
        CounterRng g;
        double rate;
        double next;

        double advance() {
            next += env::exponential(g, rate);
            return next;
        }
    };

    Cursor open(long site) const {
        Cursor cur{CounterRng(env::site_key(rng, site, -1)), rate(site), 0.0};
        cur.advance();
        return cur;
    }
};

struct InitialCondition {
    enum class Kind { step, bernoulli, profile, sites };
    Kind kind = Kind::step;
    long edge = 0;  // step: sites <= edge occupied
    double rho = 0.5;
    hydro::PiecewiseProfile profile = hydro::PiecewiseProfile::constant(0.5);
    std::vector<long> occupied_sites;

    static InitialCondition step(long edge = 0) {
        InitialCondition ic;
        ic.edge = edge;
        return ic;
    }
    static InitialCondition bernoulli(double rho) {
        if (!(rho >= 0 && rho <= 1)) throw ParameterError("bernoulli: rho must lie in [0,1]");
        InitialCondition ic;
        ic.kind = Kind::bernoulli;
        ic.rho = rho;
        return ic;
    }
    static InitialCondition from_profile(hydro::PiecewiseProfile p) {
        p.validate();
        InitialCondition ic;
        ic.kind = Kind::profile;
        ic.profile = std::move(p);
        return ic;
    }
    static InitialCondition sites(std::vector<long> s) {
        InitialCondition ic;
        ic.kind = Kind::sites;
        std::sort(s.begin(), s.end());
        ic.occupied_sites = std::move(s);
        return ic;
    }

    bool occupied(long i, int n, const RngSpec& rng) const {
        switch (kind) {
        case Kind::step: return i <= edge;
        case Kind::sites: return std::binary_search(occupied_sites.begin(), occupied_sites.end(), i);
        case Kind::bernoulli:
        case Kind::profile: {
            const double p = kind == Kind::bernoulli ? rho : profile.density(static_cast<double>(i) / n);
            CounterRng g(env::site_key(rng, i, -2));
            return env::uniform01(g) < p;
        }
        }
        return false;
    }
};

struct TasepState {
    long i_min = 0, i_max = -1;
    double time = 0.0;
    std::vector<int> eta;
    std::vector<long> z;
    std::vector<long> J;

    int eta_at(long i) const { return eta[static_cast<std::size_t>(i - i_min)]; }
    long z_at(long i) const { return z[static_cast<std::size_t>(i - i_min)]; }
    long J_at(long i) const { return J[static_cast<std::size_t>(i - i_min)]; }
};

struct TasepTrajectory {
    long domain_lo = 0, domain_hi = -1;
    long window_lo = 0, window_hi = -1;
    std::vector<long> z0;  // initial heights over the domain
    std::vector<TasepState> snapshots;
    std::uint64_t rings = 0;
    std::uint64_t jumps = 0;
    std::uint64_t window_jumps = 0;

    long z_initial(long i) const { return z0[static_cast<std::size_t>(i - domain_lo)]; }
};

struct TasepConfig {
    SpeedFunction c = SpeedFunction::constant(1.0);
    int n = 1;
    InitialCondition initial;
    double horizon = 1.0;  // microscopic time
    long window_lo = 0, window_hi = 0;
    double buffer_factor = 4.0;
    long buffer_extra = 64;
    RngSpec rng;
    std::vector<double> sample_times;  // microscopic; the horizon is always sampled

    long buffer() const { return static_cast<long>(std::ceil(buffer_factor * c.max_rate() * horizon)) + buffer_extra; }
};

/// Binary min-heap of (ring time, site) with ties broken by site; replace_top reschedules the
/// earliest entry with a single sift-down.
class RingHeap {
public:
    struct Entry {
        double time;
        long site;
        bool operator<(const Entry& o) const { return time < o.time || (time == o.time && site < o.site); }
    };

    bool empty() const { return h_.empty(); }
    const Entry& top() const { return h_.front(); }

    void push(Entry e) {
        h_.push_back(e);
        std::size_t k = h_.size() - 1;
        while (k > 0) {
            const std::size_t p = (k - 1) / 2;
            if (!(h_[k] < h_[p])) break;
            std::swap(h_[k], h_[p]);
            k = p;
        }
    }

    void replace_top(double time) {
        Entry e{time, h_.front().site};
        const std::size_t n = h_.size();
        std::size_t k = 0;
        for (;;) {
            std::size_t c = 2 * k + 1;
            if (c >= n) break;
            if (c + 1 < n && h_[c + 1] < h_[c]) ++c;
            if (!(h_[c] < e)) break;
            h_[k] = h_[c];
            k = c;
        }
        h_[k] = e;
    }

private:
    std::vector<Entry> h_;
};

/// Event-driven exclusion dynamics on [lo, hi]. A ring at i moves a particle to i+1 when possible;
/// the site right of hi absorbs particles and nothing enters at lo.
class TasepEngine {
public:
    TasepEngine(const ClockStream& clocks, long lo, long hi, std::vector<char> eta)
        : lo_(lo), hi_(hi), eta_(std::move(eta)), J_(eta_.size(), 0) {
        if (hi < lo || eta_.size() != static_cast<std::size_t>(hi - lo + 1)) throw ParameterError("TasepEngine: bad domain");
        cursors_.reserve(eta_.size());
        for (long i = lo; i <= hi; ++i) {
            cursors_.push_back(clocks.open(i));
            heap_.push({cursors_.back().next, i});
        }
    }

    struct Ring {
        double time;
        long site;
        bool moved;
    };

    double peek() const { return heap_.top().time; }

    Ring next() {
        const auto [t, i] = heap_.top();
        const std::size_t k = static_cast<std::size_t>(i - lo_);
        bool moved = false;
        if (eta_[k] && (i == hi_ || !eta_[k + 1])) {
            eta_[k] = 0;
            if (i < hi_) eta_[k + 1] = 1;
            ++J_[k];
            moved = true;
            ++jumps_;
        }
        ++rings_;
        heap_.replace_top(cursors_[k].advance());
        time_ = t;
        return {t, i, moved};
    }

    long lo() const { return lo_; }
    long hi() const { return hi_; }
    int eta(long i) const { return eta_[static_cast<std::size_t>(i - lo_)]; }
    long current(long i) const { return J_[static_cast<std::size_t>(i - lo_)]; }
    double time() const { return time_; }
    std::uint64_t rings() const { return rings_; }
    std::uint64_t jumps() const { return jumps_; }

private:
    long lo_, hi_;
    std::vector<char> eta_;
    std::vector<long> J_;
    std::vector<ClockStream::Cursor> cursors_;
    RingHeap heap_;
    double time_ = 0.0;
    std::uint64_t rings_ = 0, jumps_ = 0;
};

namespace detail {

/// Initial heights with z_0(0) = 0 and eta_i = z_i - z_{i-1}.
inline std::vector<long> initial_heights(const std::vector<char>& eta, long lo, long hi, const InitialCondition& ic,
                                         int n, const RngSpec& rng) {
    long z_lo;  // z at site lo
    if (lo <= 0) {
        long s = 0;
        for (long j = lo + 1; j <= 0; ++j) s += (j <= hi ? eta[static_cast<std::size_t>(j - lo)] : ic.occupied(j, n, rng));
        z_lo = -s;
    } else {
        long s = 0;
        for (long j = 1; j < lo; ++j) s += ic.occupied(j, n, rng);
        z_lo = s + eta[0];
    }
    std::vector<long> z(eta.size());
    z[0] = z_lo;
    for (std::size_t k = 1; k < eta.size(); ++k) z[k] = z[k - 1] + eta[k];
    return z;
}

} // namespace detail

/// Exact simulation with a buffer around the observation window. Sites left of the left front or
/// right of the right front may differ from the infinite system; reaching the window raises.
inline TasepTrajectory simulate(const TasepConfig& cfg) {
    if (cfg.n < 1) throw ParameterError("simulate: n must be >= 1");
    if (!(cfg.horizon >= 0)) throw ParameterError("simulate: horizon must be nonnegative");
    if (cfg.window_hi < cfg.window_lo) throw ParameterError("simulate: empty window");
    const long B = cfg.buffer();
    const long lo = cfg.window_lo - B, hi = cfg.window_hi + B;
    std::vector<char> eta(static_cast<std::size_t>(hi - lo + 1));
    for (long i = lo; i <= hi; ++i) eta[static_cast<std::size_t>(i - lo)] = cfg.initial.occupied(i, cfg.n, cfg.rng);

    TasepTrajectory tr;
    tr.domain_lo = lo;
    tr.domain_hi = hi;
    tr.window_lo = cfg.window_lo;
    tr.window_hi = cfg.window_hi;
    tr.z0 = detail::initial_heights(eta, lo, hi, cfg.initial, cfg.n, cfg.rng);

    std::vector<double> times = cfg.sample_times;
    for (double s : times)
        if (!(s >= 0 && s <= cfg.horizon)) throw ParameterError("simulate: sample times must lie in [0, horizon]");
    times.push_back(cfg.horizon);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    ClockStream clocks{cfg.c, cfg.n, cfg.rng};
    TasepEngine eng(clocks, lo, hi, std::move(eta));
    auto snapshot = [&](double t) {
        TasepState s;
        s.i_min = cfg.window_lo;
        s.i_max = cfg.window_hi;
        s.time = t;
        for (long i = cfg.window_lo; i <= cfg.window_hi; ++i) {
            s.eta.push_back(eng.eta(i));
            s.J.push_back(eng.current(i));
            s.z.push_back(tr.z_initial(i) - eng.current(i));
        }
        tr.snapshots.push_back(std::move(s));
    };
    long left_front = lo, right_front = hi + 1;
    std::size_t next_sample = 0;
    for (;;) {
        const double t = eng.peek();
        while (next_sample < times.size() && times[next_sample] < t) snapshot(times[next_sample++]);
        if (t > cfg.horizon) break;
        const auto ring = eng.next();
        if (ring.site == left_front) ++left_front;
        if (ring.site == right_front - 1) --right_front;
        if (left_front >= cfg.window_lo || right_front <= cfg.window_hi)
            throw WindowOverflowError("simulate: influence of the truncation reached the window at time " +
                                      std::to_string(ring.time));
        if (ring.moved && ring.site >= cfg.window_lo - 1 && ring.site <= cfg.window_hi) ++tr.window_jumps;
    }
    tr.rings = eng.rings();
    tr.jumps = eng.jumps();
    return tr;
}

/// n^-1 sum of eta_i over i in (na, nb].
inline double occupation_measure(const TasepState& s, double a, double b, int n) {
    const long i0 = static_cast<long>(std::floor(n * a)) + 1, i1 = static_cast<long>(std::floor(n * b));
    if (b < a || i0 < s.i_min || i1 > s.i_max) throw DomainError("occupation_measure: range outside the window");
    long count = 0;
    for (long i = i0; i <= i1; ++i) count += s.eta_at(i);
    return static_cast<double>(count) / n;
}

inline double occupation_measure(const TasepTrajectory& tr, double a, double b, double t, int n) {
    for (const auto& s : tr.snapshots)
        if (std::abs(s.time - n * t) <= 1e-9 * (1.0 + n * t)) return occupation_measure(s, a, b, n);
    throw DomainError("occupation_measure: no snapshot at the requested time");
}

struct HistogramBin {
    double lo, hi, density;
    std::size_t sites;
};

/// Empirical density per macroscopic bin [lo, hi) over sites i with i/n in the bin and outside the
/// excluded intervals.
inline std::vector<HistogramBin> density_histogram(const TasepState& s, int n, const std::vector<double>& edges,
                                                   const std::vector<std::pair<double, double>>& exclude = {}) {
    std::vector<HistogramBin> out;
    for (std::size_t b = 1; b < edges.size(); ++b) {
        HistogramBin bin{edges[b - 1], edges[b], 0.0, 0};
        long count = 0;
        for (long i = static_cast<long>(std::ceil(bin.lo * n)); static_cast<double>(i) / n < bin.hi; ++i) {
            const double x = static_cast<double>(i) / n;
            bool skip = false;
            for (const auto& [a, c] : exclude) skip = skip || (x >= a && x <= c);
            if (skip) continue;
            if (i < s.i_min || i > s.i_max) throw DomainError("density_histogram: bin outside the window");
            count += s.eta_at(i);
            ++bin.sites;
        }
        bin.density = bin.sites ? static_cast<double>(count) / static_cast<double>(bin.sites) : 0.0;
        out.push_back(bin);
    }
    return out;
}

struct ProfileBin {
    double lo, hi;
    double empirical;
    double closed_form;
    std::size_t sites;
};

struct ProfileComparison {
    std::vector<ProfileBin> bins;
    std::vector<std::pair<double, double>> excluded;
    double max_abs_err = 0.0;
    std::size_t reps = 0;
};

struct ProfileExperiment {
    double c1 = 1.0, c2 = 0.5, rho = 0.3, t = 1.0;
    int n = 2000;
    std::size_t reps = 16;
    double x_min = -1.0, x_max = 0.7, bin = 0.1, zone = 0.05;
    std::uint64_t seed = 1;
    int workers = 0;
};

/// Replica-averaged binned density of two-phase TASEP from Bernoulli(rho) data against the closed-form
/// profile averaged over the same sites. Sites within zone/2 of the interface or a shock are dropped.
inline ProfileComparison compare_profile(const ProfileExperiment& ex) {
    if (ex.n < 1 || ex.reps < 1 || !(ex.t > 0) || !(ex.bin > 0) || !(ex.x_max > ex.x_min))
        throw ParameterError("compare_profile: invalid experiment");
    ProfileComparison out;
    out.reps = ex.reps;
    auto prof = [&](double x) { return hydro::two_phase_profile(ex.rho, ex.c1, ex.c2, x, ex.t); };
    const auto rep = hydro::entropy_check(prof, ex.c1, ex.c2, ex.t);
    std::vector<double> cuts = rep.jumps;
    cuts.push_back(0.0);
    for (double x : cuts) out.excluded.push_back({x - 0.5 * ex.zone, x + 0.5 * ex.zone});
    std::vector<double> edges;
    const int nb = static_cast<int>(std::lround((ex.x_max - ex.x_min) / ex.bin));
    for (int b = 0; b <= nb; ++b) edges.push_back(ex.x_min + b * ex.bin);
    const SpeedFunction c = SpeedFunction::two_phase(ex.c1, ex.c2);
    auto run = [&](const RngSpec& r) {
        TasepConfig cfg;
        cfg.c = c;
        cfg.n = ex.n;
        cfg.initial = InitialCondition::bernoulli(ex.rho);
        cfg.horizon = ex.n * ex.t;
        cfg.window_lo = static_cast<long>(std::floor(ex.x_min * ex.n));
        cfg.window_hi = static_cast<long>(std::ceil(ex.x_max * ex.n));
        cfg.rng = r;
        const auto tr = simulate(cfg);
        std::vector<double> d;
        for (const auto& b : density_histogram(tr.snapshots.back(), ex.n, edges, out.excluded)) d.push_back(b.density);
        return d;
    };
    const auto per_rep = mc::map_replicas(run, ex.reps, ex.seed, ex.workers);
    for (int b = 0; b < nb; ++b) {
        ProfileBin pb{edges[b], edges[b + 1], 0.0, 0.0, 0};
        for (const auto& d : per_rep) pb.empirical += d[b] / static_cast<double>(ex.reps);
        double s = 0.0;
        for (long i = static_cast<long>(std::ceil(pb.lo * ex.n)); static_cast<double>(i) / ex.n < pb.hi; ++i) {
            const double x = static_cast<double>(i) / ex.n;
            bool skip = false;
            for (const auto& [a, e] : out.excluded) skip = skip || (x >= a && x <= e);
            if (skip) continue;
            s += prof(x);
            ++pb.sites;
        }
        if (pb.sites == 0) continue;
        pb.closed_form = s / static_cast<double>(pb.sites);
        out.max_abs_err = std::max(out.max_abs_err, std::abs(pb.empirical - pb.closed_form));
        out.bins.push_back(pb);
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// xi processes

struct XiState {
    long k = 0;
    long lo = 0, hi = -1;
    double time = 0.0;
    std::vector<long> xi;

    long at(long i) const { return xi[static_cast<std::size_t>(i - lo)]; }
};

struct XiEvent {
    double time;
    long site;
    long value;
};

/// Height changes of xi^k; any site not listed keeps its wedge value max(0, -i).
struct XiTrajectory {
    long k = 0;
    long lo = 0, hi = -1;
    double horizon = 0.0;
    std::vector<XiEvent> events;

    static long initial(long i) { return std::max(0L, -i); }

    long value_at(long i, double t) const {
        long v = initial(i);
        for (const auto& e : events) {
            if (e.time > t) break;
            if (e.site == i) v = e.value;
        }
        return v;
    }

    XiState state_at(double t) const {
        XiState s{k, lo, hi, t, {}};
        for (long i = lo; i <= hi; ++i) s.xi.push_back(initial(i));
        for (const auto& e : events) {
            if (e.time > t) break;
            s.xi[static_cast<std::size_t>(e.site - lo)] = e.value;
        }
        return s;
    }

    /// L(i, level): first time xi_i >= level; 0 when the wedge already covers it, +inf if not reached.
    double first_passage(long i, long level) const {
        if (initial(i) >= level) return 0.0;
        for (const auto& e : events)
            if (e.site == i && e.value >= level) return e.time;
        return std::numeric_limits<double>::infinity();
    }
};

struct XiOptions {
    double horizon = 1.0;
    long lo = -64, hi = 64;
    std::optional<std::pair<long, long>> stop;  // stop once xi_site >= level
};

/// xi^k on [lo, hi]: site i reads the clock of site i + k and moves up when xi_i < xi_{i-1} and
/// xi_i <= xi_{i+1}. A change at either end of the domain raises.
inline XiTrajectory simulate_xi(long k, const ClockStream& clocks, const XiOptions& opt) {
    if (opt.hi < opt.lo + 2) throw ParameterError("simulate_xi: domain too small");
    XiTrajectory tr{k, opt.lo, opt.hi, opt.horizon, {}};
    const long lo = opt.lo, hi = opt.hi;
    std::vector<long> xi;
    std::vector<ClockStream::Cursor> cur;
    RingHeap heap;
    for (long i = lo; i <= hi; ++i) {
        xi.push_back(XiTrajectory::initial(i));
        cur.push_back(clocks.open(i + k));
        heap.push({cur.back().next, i});
    }
    auto val = [&](long i) {
        if (i < lo || i > hi) return XiTrajectory::initial(i);
        return xi[static_cast<std::size_t>(i - lo)];
    };
    if (opt.stop && val(opt.stop->first) >= opt.stop->second) return tr;
    while (!heap.empty()) {
        const auto [t, i] = heap.top();
        if (t > opt.horizon) break;
        const long v = val(i);
        if (v < val(i - 1) && v <= val(i + 1)) {
            if (i == lo || i == hi) throw WindowOverflowError("simulate_xi: the process reached the domain edge");
            xi[static_cast<std::size_t>(i - lo)] = v + 1;
            tr.events.push_back({t, i, v + 1});
            if (opt.stop && i == opt.stop->first && v + 1 >= opt.stop->second) return tr;
        }
        heap.replace_top(cur[static_cast<std::size_t>(i - lo)].advance());
    }
    return tr;
}

// ---------------------------------------------------------------------------------------------
// envelope property

struct EnvelopeViolation {
    double time;
    long site;
    long z;
    long envelope;
    long argmax_k;
};

struct EnvelopeReport {
    bool pass = true;
    std::size_t checks = 0;
    std::uint64_t window_jumps = 0;
    long k_lo = 0, k_hi = -1;
    std::vector<EnvelopeViolation> violations;
};

/// Compares z_i(t) with sup_k { z_k(0) - xi^k_{i-k}(t) } on every snapshot and window site.
inline EnvelopeReport envelope_check(const TasepTrajectory& z, const std::vector<XiTrajectory>& xis) {
    EnvelopeReport rep;
    rep.window_jumps = z.window_jumps;
    if (xis.empty()) throw ParameterError("envelope_check: no xi processes");
    rep.k_lo = xis.front().k;
    rep.k_hi = xis.back().k;
    for (const auto& s : z.snapshots) {
        std::vector<XiState> states;
        for (const auto& x : xis) states.push_back(x.state_at(s.time));
        for (long i = s.i_min; i <= s.i_max; ++i) {
            long best = std::numeric_limits<long>::min(), arg = 0;
            for (std::size_t q = 0; q < xis.size(); ++q) {
                const long k = xis[q].k;
                if (k < z.domain_lo || k > z.domain_hi) continue;
                const long j = i - k;
                const long xv = (j >= states[q].lo && j <= states[q].hi) ? states[q].at(j) : XiTrajectory::initial(j);
                const long v = z.z_initial(k) - xv;
                if (v > best) {
                    best = v;
                    arg = k;
                }
            }
            ++rep.checks;
            if (best != s.z_at(i)) {
                rep.pass = false;
                rep.violations.push_back({s.time, i, s.z_at(i), best, arg});
            }
        }
    }
    return rep;
}

struct EnvelopeConfig {
    SpeedFunction c = SpeedFunction::constant(1.0);
    int n = 1;
    long window_lo = -20, window_hi = 19;
    double horizon = 30.0;
    int samples = 100;
    RngSpec rng;
    std::optional<RngSpec> xi_rng;  // set to a different stream for the mismatched-clock control
};

/// Coupled run: z from step initial data and the family xi^k over the z domain, all on one clock set.
inline EnvelopeReport run_envelope(const EnvelopeConfig& ec) {
    TasepConfig cfg;
    cfg.c = ec.c;
    cfg.n = ec.n;
    cfg.initial = InitialCondition::step(0);
    cfg.horizon = ec.horizon;
    cfg.window_lo = ec.window_lo;
    cfg.window_hi = ec.window_hi;
    cfg.rng = ec.rng;
    for (int s = 0; s <= ec.samples; ++s) cfg.sample_times.push_back(ec.horizon * s / ec.samples);
    const TasepTrajectory z = simulate(cfg);
    const ClockStream clocks{ec.c, ec.n, ec.xi_rng.value_or(ec.rng)};
    const long B = cfg.buffer();
    XiOptions xo;
    xo.horizon = ec.horizon;
    xo.lo = -B;
    xo.hi = B;
    std::vector<XiTrajectory> xis;
    for (long k = z.domain_lo; k <= z.domain_hi; ++k) xis.push_back(simulate_xi(k, clocks, xo));
    return envelope_check(z, xis);
}

// ---------------------------------------------------------------------------------------------
// TASEP and last-passage coupling

/// Time at which particle n (initially at -n, sites <= -1 occupied) completes m jumps, rates 1.
inline double particle_passage_time(int m, int n, const RngSpec& rng) {
    if (m < 1 || n < 1) throw ParameterError("particle_passage_time: m, n must be >= 1");
    const long lo = -n, hi = m - 1;
    std::vector<char> eta(static_cast<std::size_t>(hi - lo + 1), 0);
    for (long i = lo; i <= -1; ++i) eta[static_cast<std::size_t>(i - lo)] = 1;
    TasepEngine eng(ClockStream{SpeedFunction::constant(1.0), 1, rng}, lo, hi, std::move(eta));
    const long bond = m - n - 1;
    for (;;) {
        const auto r = eng.next();
        if (r.moved && r.site == bond && eng.current(bond) == n) return r.time;
    }
}

struct CouplingReport {
    mc::KSResult ks;
    mc::Estimate lpp;
    mc::Estimate tasep;
    double mean_diff = 0.0;
    double pooled_se = 0.0;
    bool pass = false;
};

/// Two independent samples: G(m,n) from Exp(1) last passage with the origin weight included, and
/// the simulated passage time of particle n.
inline CouplingReport lpp_coupling_check(int m, int n, std::size_t reps, std::uint64_t seed, int workers = 0) {
    auto lpp = [&](const RngSpec& r) {
        return lattice::last_passage_value(m - 1, n - 1, [&](int i, int j) { return env::exponential_weight(r, 1.0, i, j); }, true);
    };
    auto sim = [&](const RngSpec& r) { return particle_passage_time(m, n, r); };
    const auto a = mc::map_replicas(lpp, reps, seed, workers);
    const auto b = mc::map_replicas(sim, reps, env::mix(seed, 0x7a5e9), workers);
    CouplingReport rep;
    rep.ks = mc::ks_two_sample(a, b);
    rep.lpp = mc::summarize(a, seed);
    rep.tasep = mc::summarize(b, env::mix(seed, 0x7a5e9));
    rep.mean_diff = rep.lpp.mean - rep.tasep.mean;
    rep.pooled_se = std::hypot(rep.lpp.std_error, rep.tasep.std_error);
    rep.pass = rep.ks.p_value > 0.01 && std::abs(rep.mean_diff) <= 3.0 * rep.pooled_se;
    return rep;
}

} // namespace growthlab::tasep
