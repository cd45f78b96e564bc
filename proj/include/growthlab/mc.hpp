#pragma once

#include <growthlab/env.hpp>
#include <growthlab/errors.hpp>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace growthlab::mc {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

struct KSResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

struct PowerFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Worker count from GROWTHLAB_WORKERS, else the hardware concurrency.
inline int worker_count() {
    if (const char* s = std::getenv("GROWTHLAB_WORKERS")) {
        const int w = std::atoi(s);
        if (w >= 1) return w;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs experiment(RngSpec{base_seed, i}) for i in [0, reps) on a thread pool. Results come back in
/// replica order, so every downstream fold is independent of scheduling.
template <class F>
auto map_replicas(F&& experiment, std::size_t reps, std::uint64_t base_seed, int workers = 0) {
    using R = std::decay_t<decltype(experiment(env::RngSpec{}))>;
    std::vector<R> out(reps);
    if (workers <= 0) workers = worker_count();
    workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(reps, 1)));
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::size_t err_index = reps;
    std::string err_what;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= reps) return;
            try {
                out[i] = experiment(env::RngSpec{base_seed, i});
            } catch (const std::exception& e) {
                std::lock_guard lock(err_mu);
                if (i < err_index) {
                    err_index = i;
                    err_what = e.what();
                }
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (err_index < reps) throw ReplicaError(err_index, err_what);
    return out;
}

inline Estimate summarize(const std::vector<double>& xs, std::uint64_t seed = 0) {
    if (xs.empty()) throw InsufficientSamplesError("summarize: no samples");
    Estimate e;
    e.reps = xs.size();
    e.seed = seed;
    double s = 0.0;
    for (double x : xs) s += x;
    e.mean = s / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - e.mean) * (x - e.mean);
        e.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return e;
}

template <class F>
Estimate run_replicas(F&& experiment, std::size_t reps, std::uint64_t base_seed, int workers = 0) {
    if (reps < 1) throw ParameterError("run_replicas: reps must be >= 1");
    const std::vector<double> xs = map_replicas(std::forward<F>(experiment), reps, base_seed, workers);
    return summarize(xs, base_seed);
}

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

template <class Cdf>
KSResult ks_test(std::vector<double> samples, Cdf&& cdf) {
    if (samples.size() < 10) throw InsufficientSamplesError("ks_test: need at least 10 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double F = cdf(samples[k]);
        d = std::max({d, (k + 1) / n - F, F - k / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d), samples.size()};
}

inline KSResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 10 || b.size() < 10) throw InsufficientSamplesError("ks_two_sample: need at least 10 samples each");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d), a.size() + b.size()};
}

/// Pearson chi-square goodness of fit; p-value from the regularized upper incomplete gamma.
inline double chi_square_p(const std::vector<double>& observed, const std::vector<double>& expected) {
    if (observed.size() != expected.size() || observed.size() < 2)
        throw InsufficientSamplesError("chi_square_p: need matching vectors with >= 2 cells");
    double stat = 0.0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        if (!(expected[k] > 0)) throw ParameterError("chi_square_p: expected counts must be positive");
        stat += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
    }
    const double dof = static_cast<double>(observed.size() - 1);
    return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

/// Least-squares slope of log ys against log xs.
inline PowerFit fit_power_exponent(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 5)
        throw InsufficientSamplesError("fit_power_exponent: need at least 5 matching points");
    const std::size_t n = xs.size();
    double sx = 0, sy = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(xs[k] > 0) || !(ys[k] > 0)) throw DomainError("fit_power_exponent: data must be positive");
        lx[k] = std::log(xs[k]);
        ly[k] = std::log(ys[k]);
        sx += lx[k];
        sy += ly[k];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
        syy += (ly[k] - my) * (ly[k] - my);
    }
    if (sxx == 0) throw DomainError("fit_power_exponent: xs must not be all equal");
    PowerFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

} // namespace growthlab::mc
