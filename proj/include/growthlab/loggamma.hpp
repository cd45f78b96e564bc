#pragma once

#include <growthlab/convex.hpp>
#include <growthlab/errors.hpp>
#include <growthlab/mc.hpp>
#include <growthlab/specfun.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace growthlab::loggamma {

using specfun::digamma;
using specfun::log_gamma;
using specfun::trigamma;

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct LogGammaParams {
    double mu = 2.0;
    double theta = 1.0;

    void validate() const {
        if (!(mu > 0)) throw ParameterError("LogGammaParams: mu must be positive");
        if (!(theta > 0 && theta < mu)) throw ParameterError("LogGammaParams: theta must lie in (0, mu)");
    }
};

// ---------------------------------------------------------------------------------------------
// Burke propagation

/// One propagation step. X comes from the incoming pair (U, V).
struct StationaryCell {
    double U, V, Y;
    double U_out = 0, V_out = 0, X = 0;

    static StationaryCell propagate(double U, double V, double Y) {
        if (!(U > 0) || !(V > 0) || !(Y > 0)) throw DomainError("StationaryCell: inputs must be positive");
        StationaryCell c{U, V, Y};
        c.U_out = Y * (1.0 + U / V);
        c.V_out = Y * (1.0 + V / U);
        c.X = 1.0 / (1.0 / U + 1.0 / V);
        return c;
    }
};

/// U(i,j) for i = 1..m, j = 0..n; V(i,j) for i = 0..m, j = 1..n; X(i,j) for i = 0..m-1, j = 0..n-1.
struct BurkeField {
    int m = 0, n = 0;
    std::vector<double> U, V, X;

    double u(int i, int j) const { return U[static_cast<std::size_t>(j) * m + (i - 1)]; }
    double v(int i, int j) const { return V[static_cast<std::size_t>(j - 1) * (m + 1) + i]; }
    double x(int i, int j) const { return X[static_cast<std::size_t>(j) * m + i]; }
};

/// U_row[i-1] = U(i,0), V_col[j-1] = V(0,j), Y_bulk[(j-1) m + (i-1)] = Y(i,j).
inline BurkeField burke_propagate(const std::vector<double>& U_row, const std::vector<double>& V_col,
                                  const std::vector<double>& Y_bulk) {
    BurkeField f;
    f.m = static_cast<int>(U_row.size());
    f.n = static_cast<int>(V_col.size());
    if (Y_bulk.size() != U_row.size() * V_col.size()) throw ParameterError("burke_propagate: Y size mismatch");
    for (double v : U_row) if (!(v > 0)) throw DomainError("burke_propagate: nonpositive U");
    for (double v : V_col) if (!(v > 0)) throw DomainError("burke_propagate: nonpositive V");
    for (double v : Y_bulk) if (!(v > 0)) throw DomainError("burke_propagate: nonpositive Y");
    const std::size_t m = static_cast<std::size_t>(f.m), n = static_cast<std::size_t>(f.n);
    f.U.assign(m * (n + 1), 0.0);
    f.V.assign((m + 1) * n, 0.0);
    f.X.assign(m * n, 0.0);
    for (std::size_t i = 1; i <= m; ++i) f.U[i - 1] = U_row[i - 1];
    for (std::size_t j = 1; j <= n; ++j) f.V[(j - 1) * (m + 1)] = V_col[j - 1];
    for (std::size_t j = 1; j <= n; ++j)
        for (std::size_t i = 1; i <= m; ++i) {
            const double u_in = f.U[(j - 1) * m + (i - 1)];
            const double v_in = f.V[(j - 1) * (m + 1) + (i - 1)];
            const auto c = StationaryCell::propagate(u_in, v_in, Y_bulk[(j - 1) * m + (i - 1)]);
            f.U[j * m + (i - 1)] = c.U_out;
            f.V[(j - 1) * (m + 1) + i] = c.V_out;
            f.X[(j - 1) * m + (i - 1)] = c.X;
        }
    return f;
}

/// E log Z^(theta)_{m,n} = -m Psi0(theta) - n Psi0(mu - theta).
inline double stationary_mean_logZ(int m, int n, const LogGammaParams& p) {
    p.validate();
    return -m * digamma(p.theta) - n * digamma(p.mu - p.theta);
}

// ---------------------------------------------------------------------------------------------
// free energy and explicit rates

/// theta solving t Psi1(mu - theta) = s Psi1(theta), for s, t > 0.
inline double theta_st(double s, double t, double mu) {
    if (!(s > 0 && t > 0 && mu > 0)) throw ParameterError("theta_st: need s, t, mu > 0");
    auto f = [&](double th) { return t * trigamma(mu - th) - s * trigamma(th); };
    return specfun::solve_monotone_root(f, {mu * 1e-12, mu * (1.0 - 1e-12)}, {1e-14, 1e-14, 400});
}

/// p_mu(s,t); on the boundary p(s,0) = -s Psi0(mu).
inline double free_energy(double s, double t, double mu) {
    if (!(s >= 0 && t >= 0) || (s == 0 && t == 0)) throw ParameterError("free_energy: need s, t >= 0, not both 0");
    if (!(mu > 0)) throw ParameterError("free_energy: mu must be positive");
    if (s == 0 || t == 0) return -(s + t) * digamma(mu);
    const double th = theta_st(s, t, mu);
    return -(s * digamma(th) + t * digamma(mu - th));
}

/// Lambda_mu(xi) = ln Gamma(mu - xi) - ln Gamma(mu), the log-mgf of log Y with 1/Y ~ Gamma(mu).
inline double lmgf(double mu, double xi) {
    if (xi >= mu) return inf;
    return log_gamma(mu - xi) - log_gamma(mu);
}

/// Cramer rate of log Y: -r Psi0^-1(-r) - ln Gamma(Psi0^-1(-r)) + mu r + ln Gamma(mu).
inline double cramer_rate(double r, double mu) {
    if (!(mu > 0)) throw ParameterError("cramer_rate: mu must be positive");
    const double x = specfun::inv_digamma(-r);
    return std::max(0.0, -r * x - log_gamma(x) + mu * r + log_gamma(mu));
}

/// Upper-tail rate on the axis: x I(r/x) above the mean, r mu at x = 0 for r >= 0, else 0.
inline double boundary_rate(double x, double r, double mu) {
    if (!(x >= 0)) throw ParameterError("boundary_rate: x must be >= 0");
    if (x == 0) return r >= 0 ? r * mu : 0.0;
    if (r <= -x * digamma(mu)) return 0.0;
    return x * cramer_rate(r / x, mu);
}

// ---------------------------------------------------------------------------------------------
// point-to-point rate J_{s,t}

namespace detail {

inline constexpr double eps_guard = 1e-6;

/// K(xi) = inf over theta in (xi, mu) of t Lambda_theta(xi) - s Lambda_{mu-theta}(-xi).
/// Strictly convex in theta and infinite at both ends, so the whole interval is searched.
inline double dual_closed(double s, double t, double mu, double xi) {
    if (xi == 0) return 0.0;
    if (s == 0 || t == 0) return (s + t) * (log_gamma(mu - xi) - log_gamma(mu));
    auto F = [&](double th) {
        return t * (log_gamma(th - xi) - log_gamma(th)) - s * (log_gamma(mu - th + xi) - log_gamma(mu - th));
    };
    const double lo = xi + (mu - xi) * 1e-9, hi = mu - (mu - xi) * 1e-9;
    auto negF = [&](double th) { return -F(th); };
    return -convex::golden_max(negF, lo, hi, 1e-12).value;
}

} // namespace detail

/// J_{s,t}(r) = sup_{xi in [0, mu)} { r xi - K(xi) } with K tabulated on a 512-point grid and the
/// maximizer refined by golden-section.
class PointRate {
public:
    PointRate(double s, double t, double mu, int grid_points = 512) : s_(s), t_(t), mu_(mu) {
        if (!(s >= 0 && t >= 0) || (s == 0 && t == 0)) throw ParameterError("PointRate: need s, t >= 0, not both 0");
        if (!(mu > 0)) throw ParameterError("PointRate: mu must be positive");
        xi_max_ = mu * (1.0 - detail::eps_guard);
        xs_ = convex::linspace(0.0, xi_max_, grid_points);
        ks_.resize(xs_.size());
        for (std::size_t k = 0; k < xs_.size(); ++k) ks_[k] = detail::dual_closed(s, t, mu, xs_[k]);
        p_ = free_energy(s, t, mu);
    }

    double K(double xi) const { return detail::dual_closed(s_, t_, mu_, xi); }
    double free_energy_value() const { return p_; }
    double s() const { return s_; }
    double t() const { return t_; }
    double mu() const { return mu_; }

    double operator()(double r) const {
        if (r <= p_) return 0.0;
        std::size_t best = 0;
        double best_val = 0.0;
        for (std::size_t k = 1; k < xs_.size(); ++k) {
            const double v = r * xs_[k] - ks_[k];
            if (v > best_val) {
                best_val = v;
                best = k;
            }
        }
        const double a = xs_[best == 0 ? 0 : best - 1];
        const double b = xs_[std::min(best + 1, xs_.size() - 1)];
        auto obj = [&](double xi) { return r * xi - K(xi); };
        const auto m = convex::golden_max(obj, a, b, 1e-12);
        return std::max({0.0, best_val, m.value});
    }

private:
    double s_, t_, mu_, p_ = 0.0, xi_max_ = 0.0;
    std::vector<double> xs_, ks_;
};

inline double point_rate(double s, double t, double r, double mu) {
    if (s == 0 || t == 0) {
        if (s == 0 && t == 0) throw ParameterError("point_rate: (s,t) must not be (0,0)");
        return boundary_rate(s + t, r, mu);
    }
    return PointRate(s, t, mu)(r);
}

inline double free_endpoint_rate(double s, double r, double mu) {
    if (!(s > 0)) throw ParameterError("free_endpoint_rate: s must be positive");
    return point_rate(0.5 * s, 0.5 * s, r, mu);
}

/// sup_r { r xi - J(r) } for a convex nondecreasing rate vanishing at and below p.
template <class Rate>
double legendre_at(Rate&& J, double p, double xi) {
    auto obj = [&](double r) { return r * xi - J(r); };
    double step = 0.25;
    while (obj(p + 2 * step) > obj(p + step)) {
        step *= 2.0;
        if (step > 1e8) throw DivergenceError("legendre_at: supremum is unbounded");
    }
    return std::max(p * xi, convex::golden_max(obj, p, p + 2 * step, 1e-10).value);
}

/// J*_{s,t}(xi) as the numeric Legendre transform of the point-to-point rate; +inf for xi >= mu.
inline double dual_rate(const PointRate& J, double xi) {
    if (xi < 0) throw DomainError("dual_rate: xi must be >= 0");
    if (xi >= J.mu()) return inf;
    if (xi == 0) return 0.0;
    return legendre_at(J, J.free_energy_value(), xi);
}

inline double dual_rate(double s, double t, double xi, double mu) {
    if (xi < 0) throw DomainError("dual_rate: xi must be >= 0");
    if (xi >= mu) return inf;
    if (xi == 0) return 0.0;
    if (s == 0 || t == 0) {
        if (s == 0 && t == 0) throw ParameterError("dual_rate: (s,t) must not be (0,0)");
        const double x = s + t;
        return legendre_at([&](double r) { return boundary_rate(x, r, mu); }, -x * digamma(mu), xi);
    }
    return dual_rate(PointRate(s, t, mu), xi);
}

/// kappa*_a of the exit-point decomposition; +inf outside its branch conditions.
inline double kappa_star(double a, double s, double t, double xi, double mu, double theta) {
    if (a >= -t && a <= 0 && xi >= 0 && xi < mu && theta < mu)
        return (t + a) * (log_gamma(mu - theta + xi) - log_gamma(mu - theta));
    if (a > 0 && a <= s && xi >= 0 && xi < theta)
        return t * (log_gamma(mu - theta + xi) - log_gamma(mu - theta)) + a * (log_gamma(theta - xi) - log_gamma(theta));
    return inf;
}

/// |s d - t h - sup_{a in [-t, s]} { a u + J*_{(s,t)-a}(xi) }| with d = ln G(theta-xi)/G(theta),
/// h = ln G(mu-theta+xi)/G(mu-theta); u = h and (s, t+a) for a <= 0, u = d and (s-a, t) for a > 0.
inline double exit_decomposition_residual(double s, double t, double xi, double theta, double mu) {
    if (!(xi >= 0 && xi < theta && theta < mu)) throw ParameterError("exit_decomposition_residual: need 0 <= xi < theta < mu");
    if (!(s > 0 && t > 0)) throw ParameterError("exit_decomposition_residual: need s, t > 0");
    const double d = log_gamma(theta - xi) - log_gamma(theta);
    const double h = log_gamma(mu - theta + xi) - log_gamma(mu - theta);
    const double lhs = s * d - t * h;
    if (xi == 0) return std::abs(lhs);
    auto left = [&](double a) { return a * h + dual_rate(s, t + a, xi, mu); };
    auto right = [&](double a) { return a * d + dual_rate(s - a, t, xi, mu); };
    const double sup = std::max(convex::golden_max(left, -t, 0.0, 1e-7).value,
                                convex::golden_max(right, 0.0, s, 1e-7).value);
    return std::abs(lhs - sup);
}

struct ExponentFit {
    double slope;
    double r_squared;
    double r0;
};

/// Log-log slope of J_{1,1}(r0 + eps) over eps in [1e-3, 1e-1], r0 = -2 Psi0(mu/2).
inline ExponentFit cube_root_expansion_exponent(double mu = 2.0, int points = 12) {
    const PointRate J(1.0, 1.0, mu);
    const double r0 = -2.0 * digamma(0.5 * mu);
    std::vector<double> eps(static_cast<std::size_t>(points)), js(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        eps[k] = std::pow(10.0, -3.0 + 2.0 * k / (points - 1));
        js[k] = J(r0 + eps[k]);
    }
    const auto fit = mc::fit_power_exponent(eps, js);
    return {fit.slope, fit.r_squared, r0};
}

} // namespace growthlab::loggamma
