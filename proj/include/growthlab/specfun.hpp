#pragma once

#include <growthlab/errors.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace growthlab::specfun {

struct PrecisionPolicy {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_iter = 200;

    void validate() const {
        if (!(abs_tol > 0) || !(rel_tol > 0) || max_iter < 1)
            throw ParameterError("PrecisionPolicy: tolerances must be positive and max_iter >= 1");
    }
};

struct Bracket {
    double lo;
    double hi;
};

inline constexpr double euler_gamma = std::numbers::egamma;

namespace detail {

inline void require_positive(double x, const char* who) {
    if (!std::isfinite(x) || !(x > 0))
        throw DomainError(std::string(who) + ": argument must be finite and > 0, got " + std::to_string(x));
}

// zeta(k) - 1 for k = 2..25
inline constexpr std::array<double, 24> zeta_minus_one = {
    0.64493406684822643647, 0.2020569031595942854, 0.082323233711138191516,
    0.036927755143369926331, 0.017343061984449139715, 0.0083492773819228268398,
    0.0040773561979443393787, 0.0020083928260822144179, 0.00099457512781808533715,
    0.0004941886041194645587, 0.00024608655330804829864, 0.00012271334757848914675,
    6.1248135058704829259e-5, 3.0588236307020493552e-5, 1.5282259408651871733e-5,
    7.6371976378997622736e-6, 3.8172932649998398565e-6, 1.9082127165539389257e-6,
    9.5396203387279611315e-7, 4.7693298678780646312e-7, 2.3845050272773299e-7,
    1.1921992596531107307e-7, 5.9608189051259479612e-8, 2.9803503514652280186e-8,
};

// ln Gamma(1 + e) for |e| <= 0.25, accurate relative to the value near e = 0
inline double log_gamma_1p(double e) {
    double sum = 0.0;
    double pw = e;
    for (std::size_t k = 0; k < zeta_minus_one.size(); ++k) {
        pw *= -e;
        sum += zeta_minus_one[k] * pw / static_cast<double>(k + 2);
    }
    // sum = -sum_k (-1)^k (zeta(k)-1) e^k / k
    return -std::log1p(e) + e * (1.0 - euler_gamma) - sum;
}

inline double log_gamma_large(double x) {
    constexpr double half_log_2pi = 0.91893853320467274178;
    const double z = 1.0 / (x * x);
    const double series =
        (1.0 / 12.0 -
         z * (1.0 / 360.0 -
              z * (1.0 / 1260.0 -
                   z * (1.0 / 1680.0 -
                        z * (1.0 / 1188.0 - z * (691.0 / 360360.0 - z * (1.0 / 156.0 - z * 3617.0 / 122400.0)))))))
        / x;
    return (x - 0.5) * std::log(x) - x + half_log_2pi + series;
}

inline constexpr double shift_threshold = 10.0;

} // namespace detail

/// ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
    detail::require_positive(x, "log_gamma");
    if (x == 1.0 || x == 2.0) return 0.0;
    if (std::abs(x - 1.0) <= 0.25) return detail::log_gamma_1p(x - 1.0);
    if (std::abs(x - 2.0) <= 0.25) return detail::log_gamma_1p(x - 2.0) + std::log1p(x - 2.0);
    if (x >= detail::shift_threshold) return detail::log_gamma_large(x);
    double prod = 1.0;
    double y = x;
    while (y < detail::shift_threshold) {
        prod *= y;
        y += 1.0;
    }
    return detail::log_gamma_large(y) - std::log(prod);
}

/// Psi_0(x), the logarithmic derivative of Gamma.
inline double digamma(double x) {
    detail::require_positive(x, "digamma");
    double acc = 0.0;
    while (x < detail::shift_threshold) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double z = 1.0 / (x * x);
    const double tail =
        z * (1.0 / 12.0 -
             z * (1.0 / 120.0 -
                  z * (1.0 / 252.0 -
                       z * (1.0 / 240.0 - z * (1.0 / 132.0 - z * (691.0 / 32760.0 - z / 12.0))))));
    return acc + std::log(x) - 0.5 / x - tail;
}

/// Psi_1(x) = sum_k 1/(x+k)^2.
inline double trigamma(double x) {
    detail::require_positive(x, "trigamma");
    double acc = 0.0;
    while (x < detail::shift_threshold) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    const double z = 1.0 / (x * x);
    const double tail =
        (1.0 / 6.0 -
         z * (1.0 / 30.0 -
              z * (1.0 / 42.0 - z * (1.0 / 30.0 - z * (5.0 / 66.0 - z * (691.0 / 2730.0 - z * 7.0 / 6.0))))))
        * z / x;
    return acc + 1.0 / x + 0.5 * z + tail;
}

/// Bracketed bisection with secant steps. f must change sign on the bracket.
template <class F>
double solve_monotone_root(F&& f, Bracket b, const PrecisionPolicy& policy = {}) {
    policy.validate();
    if (!(b.lo < b.hi)) throw ParameterError("solve_monotone_root: bracket requires lo < hi");
    double lo = b.lo, hi = b.hi;
    double flo = f(lo), fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi))
        throw DomainError("solve_monotone_root: f not finite at bracket ends");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0) == (fhi < 0))
        throw NoSignChangeError("solve_monotone_root: no sign change on [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
    bool use_secant = true;
    for (int it = 0; it < policy.max_iter; ++it) {
        const double width = hi - lo;
        double x = 0.5 * (lo + hi);
        if (use_secant) {
            const double xs = hi - fhi * width / (fhi - flo);
            if (xs > lo + 0.05 * width && xs < hi - 0.05 * width) x = xs;
        }
        if (x <= lo || x >= hi) return 0.5 * (lo + hi);
        const double fx = f(x);
        if (std::abs(fx) <= policy.abs_tol) return x;
        if ((fx < 0) == (flo < 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        // fall back to bisection whenever the secant step failed to halve the bracket
        use_secant = (hi - lo) <= 0.5 * width;
        if (hi - lo <= policy.abs_tol) return 0.5 * (lo + hi);
    }
    throw IterationLimitError("solve_monotone_root: max_iter exceeded");
}

/// x > 0 with digamma(x) = y.
inline double inv_digamma(double y, const PrecisionPolicy& policy = {}) {
    policy.validate();
    if (!std::isfinite(y)) throw DomainError("inv_digamma: argument must be finite");
    if (y > 700.0) throw DomainError("inv_digamma: argument too large, result overflows");
    double lo = y >= -2.22 ? std::exp(y) * 0.5 : 1.0 / (-y + 1.0) * 0.5;
    double hi = y >= -2.22 ? std::exp(y) + 1.0 : 1.0 / (-y - euler_gamma);
    while (digamma(lo) > y) lo *= 0.5;
    while (digamma(hi) < y) hi *= 2.0;
    double x = y >= -2.22 ? std::exp(y) + 0.5 : -1.0 / (y + euler_gamma);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    for (int it = 0; it < policy.max_iter; ++it) {
        const double r = digamma(x) - y;
        if (std::abs(r) <= policy.abs_tol) return x;
        if (r < 0) lo = x; else hi = x;
        double next = x - r / trigamma(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return next;
        x = next;
    }
    throw IterationLimitError("inv_digamma: max_iter exceeded");
}

} // namespace growthlab::specfun
