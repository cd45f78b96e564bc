#pragma once

#include <growthlab/convex.hpp>
#include <growthlab/env.hpp>
#include <growthlab/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace growthlab::hydro {

using env::SpeedFunction;

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------------------------
// homogeneous shapes

/// gamma(x,y) = (sqrt(x+y) + sqrt(y))^2 on the wedge y >= 0, x >= -y.
inline double gamma_wedge(double x, double y) {
    if (!(y >= 0) || !(x + y >= 0)) throw DomainError("gamma_wedge: point outside the wedge");
    const double a = std::sqrt(x + y) + std::sqrt(y);
    return a * a;
}

/// g(y) = sup_{0<=rho<=1} { rho(1-rho) - y rho }.
inline double g_legendre(double y) {
    if (y <= -1.0) return -y;
    if (y >= 1.0) return 0.0;
    return 0.25 * (1.0 - y) * (1.0 - y);
}

/// inf_rho { y rho - c rho(1-rho) } over [0,1] (restricted) or over the reals.
inline double flux_dual(double c, double y, bool restricted) {
    double rho = (c - y) / (2.0 * c);
    if (restricted) rho = std::clamp(rho, 0.0, 1.0);
    return y * rho - c * rho * (1.0 - rho);
}

// ---------------------------------------------------------------------------------------------
// two-phase closed forms

struct TwoPhaseParams {
    double c1 = 1.0, c2 = 1.0;
    double c = 1.0, b = 1.0, rho_star = 0.5, B = 0.0;

    static TwoPhaseParams make(double c1, double c2) {
        if (!(c2 > 0) || !(c1 >= c2)) throw ParameterError("TwoPhaseParams: need c1 >= c2 > 0");
        TwoPhaseParams p;
        p.c1 = c1;
        p.c2 = c2;
        p.c = c1 / c2;
        p.b = 2.0 * p.c - 1.0 - 2.0 * std::sqrt(p.c * (p.c - 1.0));
        p.rho_star = 0.5 - 0.5 * std::sqrt(1.0 - c2 / c1);
        p.B = std::sqrt(c1 * (c1 - c2));
        return p;
    }

    double D(double rho) const { return c2 * c2 - 4.0 * c1 * c2 * rho * (1.0 - rho); }
    double D1(double rho) const { return c1 * c1 - 4.0 * c1 * c2 * rho * (1.0 - rho); }
};

/// Phi(x,y): limit of n^-1 G(nx, ny) in the two-phase corner growth model.
inline double two_phase_shape(double x, double y, double c1, double c2) {
    const auto P = TwoPhaseParams::make(c1, c2);
    if (!(x > 0 && y > 0)) throw DomainError("two_phase_shape: need x, y > 0");
    const double s = (std::sqrt(x) + std::sqrt(y)) * (std::sqrt(x) + std::sqrt(y));
    const double b = P.b, c = P.c;
    if (x <= b * b * y) return s / c1;
    if (x >= y) return s / c2;
    const double den = c1 * (1.0 - b * b);
    return x * (4.0 * c - (1.0 + b) * (1.0 + b)) / den + y * ((1.0 + b) * (1.0 + b) - 4.0 * c * b * b) / den;
}

namespace detail {

/// value v(x,t) for c1 >= c2 and constant initial density rho
inline double v_closed(double x, double t, double rho, const TwoPhaseParams& P) {
    const double c1 = P.c1, c2 = P.c2, h = rho * (1.0 - rho), rs = P.rho_star, B = P.B;
    if (x >= 0) {
        const double Rp = (rho <= 0.5 && x < t * c2 * (1.0 - 2.0 * rho)) ? -t * c2 * g_legendre(x / (t * c2))
                                                                          : rho * x - t * c2 * h;
        const double D = P.D(rho);
        const double Lp = (rho < rs && x <= t * std::sqrt(D)) ? -t * c1 * h + x * (0.5 - std::sqrt(D) / (2.0 * c2))
                                                               : -c2 * t * g_legendre(x / (t * c2));
        return std::max(Rp, Lp);
    }
    double Lm;
    const double tail = B > 0 ? -(t + x / B) * c2 / 4.0 + x * c1 / (4.0 * B) * (1.0 + B / c1) * (1.0 + B / c1)
                              : neg_inf;
    if (rho < rs) {
        Lm = rho * x - t * c1 * h;
    } else if (rho <= 0.5) {
        Lm = x <= -t * c1 * (rho - rs) ? rho * x - t * c1 * h : tail;
    } else if (rho <= 1.0 - rs) {
        Lm = x < -t * c1 * (rho - rs) ? rho * x - t * c1 * h : tail;
    } else if (x >= -B * t) {
        Lm = tail;
    } else if (x >= -c1 * t * (2.0 * rho - 1.0)) {
        Lm = -t * c1 * g_legendre(x / (t * c1));
    } else {
        Lm = rho * x - c1 * t * h;
    }
    const double D1 = P.D1(rho);
    double Rm;
    if (rho <= 0.5) Rm = -t * c1 * g_legendre(x / (t * c1));
    else if (x >= -t * std::sqrt(D1)) Rm = -t * c2 * h + x * (0.5 + std::sqrt(D1) / (2.0 * c1));
    else Rm = -t * c1 * g_legendre(x / (t * c1));
    return std::max(Rm, Lm);
}

inline double profile_ordered(double rho, double x, double t, const TwoPhaseParams& P) {
    const double c1 = P.c1, c2 = P.c2;
    if (rho < P.rho_star) {
        const double rs = 0.5 - 0.5 * std::sqrt(std::max(0.0, 1.0 - 4.0 * rho * (1.0 - rho) * c1 / c2));
        if (x < 0) return rho;
        if (x <= c2 * (1.0 - 2.0 * rs) * t) return rs;
        if (x <= c2 * (1.0 - 2.0 * rho) * t) return 0.5 * (1.0 - x / (t * c2));
        return rho;
    }
    if (rho <= 0.5) {
        if (x < -t * c1 * (rho - P.rho_star)) return rho;
        if (x < 0) return 1.0 - P.rho_star;
        if (x <= (1.0 - 2.0 * rho) * t * c2) return 0.5 * (1.0 - x / (t * c2));
        return rho;
    }
    const double rs = 0.5 - 0.5 * std::sqrt(std::max(0.0, 1.0 - 4.0 * rho * (1.0 - rho) * c2 / c1));
    if (x < -t * c1 * (rho - rs)) return rho;
    if (x < 0) return 1.0 - rs;
    return rho;
}

} // namespace detail

/// max(R+, L+) for x >= 0 and max(R-, L-) for x < 0; requires c1 >= c2.
inline double two_phase_v_closed(double x, double t, double rho, double c1, double c2) {
    if (!(t > 0)) throw ParameterError("two_phase_v_closed: t must be positive");
    if (!(rho >= 0 && rho <= 1)) throw ParameterError("two_phase_v_closed: rho must lie in [0,1]");
    return detail::v_closed(x, t, rho, TwoPhaseParams::make(c1, c2));
}

/// Density rho(x,t) for constant initial density. c1 < c2 goes through the particle-hole reflection
/// rho(x,t) = 1 - rho'(-x,t) with rates swapped and density 1 - rho.
inline double two_phase_profile(double rho, double c1, double c2, double x, double t) {
    if (!(rho > 0 && rho < 1)) throw ParameterError("two_phase_profile: rho must lie in (0,1)");
    if (!(t > 0)) throw ParameterError("two_phase_profile: t must be positive");
    if (!(c1 > 0 && c2 > 0)) throw ParameterError("two_phase_profile: rates must be positive");
    if (c1 >= c2) return detail::profile_ordered(rho, x, t, TwoPhaseParams::make(c1, c2));
    return 1.0 - detail::profile_ordered(1.0 - rho, -x, t, TwoPhaseParams::make(c2, c1));
}

// ---------------------------------------------------------------------------------------------
// macroscopic paths and Gamma^q

/// Piecewise-linear macroscopic path through its vertices (x, y) or (w, s).
struct MacroPath {
    std::vector<std::array<double, 2>> vertices;
};

namespace detail {

inline std::vector<double> columns_in(const SpeedFunction& c, double q, double lo, double hi) {
    std::vector<double> cols;
    for (double a : c.breakpoints())
        if (a + q >= lo && a + q <= hi) cols.push_back(a + q);
    return cols;
}

/// rate of the open strip between two distinct x positions, or the lsc value at a single position
inline double strip_rate(const SpeedFunction& c, double q, double xa, double xb) {
    if (xa == xb) return c(xa - q);
    return c(0.5 * (xa + xb) - q);
}

inline double wedge_seg(double dx, double dy, double r) {
    if (dy < 0 || dx + dy < -1e-15) return neg_inf;
    const double a = std::sqrt(std::max(dx + dy, 0.0)) + std::sqrt(dy);
    return a * a / r;
}

} // namespace detail

/// Integral of gamma(x')/c(x_1 - q) along a path whose segments stay inside single strips or run
/// along a column.
inline double macro_path_value(const MacroPath& p, double q, const SpeedFunction& c) {
    double sum = 0.0;
    for (std::size_t k = 1; k < p.vertices.size(); ++k) {
        const auto& a = p.vertices[k - 1];
        const auto& b = p.vertices[k];
        const double v = detail::wedge_seg(b[0] - a[0], b[1] - a[1], detail::strip_rate(c, q, a[0], b[0]));
        if (v == neg_inf) throw PathError("macro_path_value: segment leaves the wedge of admissible directions");
        sum += v;
    }
    return sum;
}

struct GammaQOptions {
    int grid = 400;
    int budget = -1;  // default 2 * (#discontinuities) + 3
};

struct GammaQResult {
    double value = 0.0;
    MacroPath path;
};

namespace detail {

struct NodeRef {
    int kind = -1;  // -1 start, 0 vertical, 1 from left column, 2 from right column
    int k = 0;
    int i = 0;
};

} // namespace detail

/// Gamma^q(x,y) by dynamic programming over visits to the discontinuity columns of c(. - q) on a
/// height grid, followed by coordinate-wise golden-section polishing of the optimal template.
inline GammaQResult gamma_q_solve(double x, double y, double q, const SpeedFunction& c, const GammaQOptions& opt = {}) {
    if (!(y >= 0) || !(x + y >= 0)) throw DomainError("gamma_q: point outside the wedge");
    const std::vector<double> cols = detail::columns_in(c, q, -y, x + y);
    const int K = static_cast<int>(cols.size());
    const int budget = opt.budget > 0 ? opt.budget : 2 * static_cast<int>(c.breakpoints().size()) + 3;
    auto strip_of = [&](double z) { return static_cast<int>(std::lower_bound(cols.begin(), cols.end(), z) - cols.begin()); };
    auto on_column = [&](double z) {
        auto it = std::lower_bound(cols.begin(), cols.end(), z);
        return (it != cols.end() && *it == z) ? static_cast<int>(it - cols.begin()) : -1;
    };
    auto rate_between = [&](double xa, double xb) { return detail::strip_rate(c, q, xa, xb); };

    GammaQResult res;
    const int start_col = on_column(0.0), end_col = on_column(x);
    if (K == 0 || y == 0) {
        if (y == 0) {
            // horizontal run at height 0 across the strips
            double v = 0.0, prev = 0.0;
            for (double a : cols) {
                v += (a - prev) / rate_between(prev, a);
                prev = a;
            }
            v += (x - prev) / rate_between(prev, x);
            res.value = v;
        } else {
            res.value = detail::wedge_seg(x, y, rate_between(0.0, x));
        }
        res.path.vertices = {{0.0, 0.0}, {x, y}};
        return res;
    }

    const int N = std::max(opt.grid, 8);
    std::vector<double> h(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) h[i] = y * i / N;
    std::vector<std::vector<double>> V(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(N) + 1, neg_inf));
    std::vector<std::vector<detail::NodeRef>> from(static_cast<std::size_t>(K), std::vector<detail::NodeRef>(static_cast<std::size_t>(N) + 1));

    // initial segments from the origin
    if (start_col >= 0) {
        V[start_col][0] = 0.0;
    } else {
        const int s0 = strip_of(0.0);
        for (int k : {s0 - 1, s0}) {
            if (k < 0 || k >= K) continue;
            const double r = rate_between(0.0, cols[k]);
            for (int i = 0; i <= N; ++i) V[k][i] = detail::wedge_seg(cols[k], h[i], r);
        }
    }

    std::vector<double> vmax(static_cast<std::size_t>(K), neg_inf);
    std::vector<int> varg(static_cast<std::size_t>(K), -1);
    for (int j = 0; j <= N; ++j) {
        for (int k = 0; k < K; ++k) {
            double best = V[k][j];
            detail::NodeRef ref{-1, k, j};
            const double ck = c(cols[k] - q);
            if (varg[k] >= 0) {
                const double v = vmax[k] + 4.0 * h[j] / ck;
                if (v > best) {
                    best = v;
                    ref = {0, k, varg[k]};
                }
            }
            if (k > 0) {
                const double r = rate_between(cols[k - 1], cols[k]);
                const double dx = cols[k] - cols[k - 1];
                for (int i = 0; i <= j; ++i) {
                    if (V[k - 1][i] == neg_inf) continue;
                    const double v = V[k - 1][i] + detail::wedge_seg(dx, h[j] - h[i], r);
                    if (v > best) {
                        best = v;
                        ref = {1, k - 1, i};
                    }
                }
            }
            if (k + 1 < K) {
                const double r = rate_between(cols[k], cols[k + 1]);
                const double dx = cols[k] - cols[k + 1];
                for (int i = 0; i < j; ++i) {
                    if (V[k + 1][i] == neg_inf) continue;
                    const double v = V[k + 1][i] + detail::wedge_seg(dx, h[j] - h[i], r);
                    if (v > best) {
                        best = v;
                        ref = {2, k + 1, i};
                    }
                }
            }
            V[k][j] = best;
            from[k][j] = ref;
        }
        for (int k = 0; k < K; ++k) {
            if (V[k][j] == neg_inf) continue;
            const double v = V[k][j] - 4.0 * h[j] / c(cols[k] - q);
            if (v > vmax[k]) {
                vmax[k] = v;
                varg[k] = j;
            }
        }
    }

    // terminal segment
    double best = neg_inf;
    int best_k = -1, best_i = -1;
    if (end_col >= 0) {
        best = V[end_col][N];
        best_k = end_col;
        best_i = N;
    } else {
        const int sx = strip_of(x);
        for (int k : {sx - 1, sx}) {
            if (k < 0 || k >= K) continue;
            const double r = rate_between(cols[k], x);
            for (int i = 0; i <= N; ++i) {
                if (V[k][i] == neg_inf) continue;
                const double v = V[k][i] + detail::wedge_seg(x - cols[k], y - h[i], r);
                if (v > best) {
                    best = v;
                    best_k = k;
                    best_i = i;
                }
            }
        }
        if (start_col < 0 && strip_of(0.0) == sx) {
            const double v = detail::wedge_seg(x, y, rate_between(0.0, x));
            if (v > best) {
                best = v;
                best_k = -1;
            }
        }
    }
    if (best == neg_inf) throw DomainError("gamma_q: no admissible path");

    // backtrack the template
    std::vector<std::array<double, 2>> pts;
    pts.push_back({x, y});
    std::vector<char> is_free;
    if (best_k >= 0) {
        int k = best_k, i = best_i;
        if (end_col < 0) pts.push_back({cols[k], h[i]});
        for (;;) {
            const detail::NodeRef ref = from[k][i];
            if (ref.kind == -1) break;
            k = ref.k;
            i = ref.i;
            pts.push_back({cols[k], h[i]});
        }
        if (!(pts.back()[0] == 0.0 && pts.back()[1] == 0.0)) pts.push_back({0.0, 0.0});
    } else {
        pts.push_back({0.0, 0.0});
    }
    std::reverse(pts.begin(), pts.end());
    // drop repeated points and merge consecutive runs along one column
    std::vector<std::array<double, 2>> tpl;
    for (const auto& p : pts) {
        if (!tpl.empty() && tpl.back() == p) continue;
        if (tpl.size() >= 2 && tpl[tpl.size() - 2][0] == p[0] && tpl.back()[0] == p[0]) tpl.back() = p;
        else tpl.push_back(p);
    }
    if (static_cast<int>(tpl.size()) - 1 > budget)
        throw BudgetExceededError("gamma_q: optimal template uses " + std::to_string(tpl.size() - 1) +
                                  " segments, budget " + std::to_string(budget));

    auto seg_value = [&](const std::array<double, 2>& a, const std::array<double, 2>& b) {
        return detail::wedge_seg(b[0] - a[0], b[1] - a[1], rate_between(a[0], b[0]));
    };
    auto total = [&] {
        double s = 0.0;
        for (std::size_t m = 1; m < tpl.size(); ++m) s += seg_value(tpl[m - 1], tpl[m]);
        return s;
    };
    double value = total();
    for (int sweep = 0; sweep < 200 && tpl.size() > 2; ++sweep) {
        const double before = value;
        for (std::size_t m = 1; m + 1 < tpl.size(); ++m) {
            const double lo = tpl[m - 1][1], hi = tpl[m + 1][1];
            if (!(hi > lo)) continue;
            auto local = [&](double hm) {
                const std::array<double, 2> pm{tpl[m][0], hm};
                return seg_value(tpl[m - 1], pm) + seg_value(pm, tpl[m + 1]);
            };
            const auto mx = convex::golden_max(local, lo, hi, 1e-14);
            if (mx.value > local(tpl[m][1])) tpl[m][1] = mx.x;
        }
        value = total();
        if (value - before <= 1e-15 * (1.0 + std::abs(value))) break;
    }
    res.value = std::max(value, best);
    res.path.vertices = std::move(tpl);
    return res;
}

inline double gamma_q(double x, double y, double q, const SpeedFunction& c, const GammaQOptions& opt = {}) {
    return gamma_q_solve(x, y, q, c, opt).value;
}

/// g^q(x,t) = inf{ y : Gamma^q(x,y) >= t } by bisection.
inline double g_level(double x, double t, double q, const SpeedFunction& c, const GammaQOptions& opt = {}) {
    if (!(t > 0)) throw ParameterError("g_level: t must be positive");
    double lo = std::max(0.0, -x);
    if (gamma_q(x, lo, q, c, opt) >= t) return lo;
    double hi = lo + 1.0;
    while (gamma_q(x, hi, q, c, opt) < t) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw DivergenceError("g_level: level not reached");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_q(x, mid, q, c, opt) >= t) hi = mid; else lo = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------------------------
// variational formula

/// Piecewise-constant density rho0 with pieces split at the breakpoints.
struct PiecewiseProfile {
    std::vector<double> breakpoints;
    std::vector<double> values;

    static PiecewiseProfile constant(double rho) { return {{}, {rho}}; }

    void validate() const {
        if (values.size() != breakpoints.size() + 1) throw ParameterError("PiecewiseProfile: need one more value than breakpoints");
        for (double v : values) if (!(v >= 0 && v <= 1)) throw ParameterError("PiecewiseProfile: densities must lie in [0,1]");
        for (std::size_t k = 1; k < breakpoints.size(); ++k)
            if (!(breakpoints[k] > breakpoints[k - 1])) throw ParameterError("PiecewiseProfile: breakpoints must increase");
    }

    double density(double x) const {
        const auto k = static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), x) - breakpoints.begin());
        return values[k];
    }

    /// v0(x) = integral of rho0 from 0 to x
    double v0(double x) const {
        auto F = [&](double z) {
            // integral from the first breakpoint (or 0 if none) to z
            double acc = 0.0, prev = breakpoints.empty() ? 0.0 : breakpoints.front();
            if (z <= prev) return values.front() * (z - prev);
            std::size_t k = breakpoints.empty() ? 0 : 1;
            for (; k < breakpoints.size() && breakpoints[k] < z; ++k) {
                acc += values[k] * (breakpoints[k] - prev);
                prev = breakpoints[k];
            }
            return acc + values[k] * (z - prev);
        };
        return F(x) - F(0.0);
    }
};

struct VariationalOptions {
    int grid = 800;
};

namespace detail {

/// cost of moving by dx in time tau at rate r: r tau g(dx/(r tau)), the limit max(-dx, 0) at tau = 0
inline double move_cost(double dx, double tau, double r) {
    if (tau <= 0) return std::max(-dx, 0.0);
    return r * tau * g_legendre(dx / (r * tau));
}

/// sup over p in [lo, hi] of v0(p) - move_cost(a - p, tau, r)
inline double best_start(const PiecewiseProfile& rho0, double lo, double hi, double a, double tau, double r) {
    double best = neg_inf;
    std::vector<double> cuts{lo};
    for (double b : rho0.breakpoints)
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    for (std::size_t k = 1; k < cuts.size(); ++k) {
        const double plo = cuts[k - 1], phi = cuts[k];
        const double mid = std::isfinite(plo) && std::isfinite(phi) ? 0.5 * (plo + phi)
                         : std::isfinite(plo) ? plo + 1.0 : std::isfinite(phi) ? phi - 1.0 : 0.0;
        const double rho = rho0.density(mid);
        double p = a - r * tau * (1.0 - 2.0 * rho);
        p = std::clamp(p, plo, phi);
        if (!std::isfinite(p)) continue;
        best = std::max(best, rho0.v0(p) - move_cost(a - p, tau, r));
    }
    return best;
}

} // namespace detail

/// v(x,t) = sup_w { v0(w(0)) - int_0^t c(w) g(w'/c(w)) ds } over paths bending only at the
/// discontinuities of c, computed on a time grid.
inline double variational_v(double x, double t, const PiecewiseProfile& rho0, const SpeedFunction& c,
                            const VariationalOptions& opt = {}) {
    rho0.validate();
    if (!(t > 0)) throw ParameterError("variational_v: t must be positive");
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double>& cols = c.breakpoints();
    const int K = static_cast<int>(cols.size());
    auto strip_lo = [&](int s) { return s == 0 ? -inf : cols[s - 1]; };
    auto strip_hi = [&](int s) { return s == K ? inf : cols[s]; };
    auto strip_rate = [&](int s) {
        const double lo = strip_lo(s), hi = strip_hi(s);
        if (std::isfinite(lo) && std::isfinite(hi)) return c(0.5 * (lo + hi));
        if (std::isfinite(lo)) return c(lo + 1.0);
        if (std::isfinite(hi)) return c(hi - 1.0);
        return c(0.0);
    };
    const int sx = static_cast<int>(std::lower_bound(cols.begin(), cols.end(), x) - cols.begin());
    const bool x_on_col = sx < K && cols[sx] == x;

    // paths that never touch a column
    double best = neg_inf;
    if (!x_on_col) best = detail::best_start(rho0, strip_lo(sx), strip_hi(sx), x, t, strip_rate(sx));
    if (K == 0) return best;

    const int N = std::max(opt.grid, 8);
    std::vector<double> tau(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) tau[i] = t * i / N;
    std::vector<std::vector<double>> V(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(N) + 1, neg_inf));
    std::vector<double> vmax(static_cast<std::size_t>(K), neg_inf);
    for (int j = 0; j <= N; ++j) {
        for (int k = 0; k < K; ++k) {
            double v = std::max(detail::best_start(rho0, strip_lo(k), cols[k], cols[k], tau[j], strip_rate(k)),
                                detail::best_start(rho0, cols[k], strip_hi(k + 1), cols[k], tau[j], strip_rate(k + 1)));
            if (vmax[k] > neg_inf) v = std::max(v, vmax[k] - c(cols[k]) / 4.0 * tau[j]);
            for (int dir : {-1, 1}) {
                const int kk = k + dir;
                if (kk < 0 || kk >= K) continue;
                const double r = strip_rate(dir < 0 ? k : k + 1);
                const double dx = cols[k] - cols[kk];
                for (int i = 0; i < j; ++i)
                    if (V[kk][i] > neg_inf) v = std::max(v, V[kk][i] - detail::move_cost(dx, tau[j] - tau[i], r));
            }
            V[k][j] = v;
        }
        // zero-duration moves between columns at the same time
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 1; k < K; ++k) V[k][j] = std::max(V[k][j], V[k - 1][j]);
            for (int k = K - 2; k >= 0; --k) V[k][j] = std::max(V[k][j], V[k + 1][j] - (cols[k + 1] - cols[k]));
        }
        for (int k = 0; k < K; ++k)
            if (V[k][j] > neg_inf) vmax[k] = std::max(vmax[k], V[k][j] + c(cols[k]) / 4.0 * tau[j]);
    }
    if (x_on_col) return std::max(best, V[sx][N]);
    for (int k : {sx - 1, sx}) {
        if (k < 0 || k >= K) continue;
        const double r = strip_rate(sx);
        for (int i = 0; i <= N; ++i)
            if (V[k][i] > neg_inf) best = std::max(best, V[k][i] - detail::move_cost(x - cols[k], t - tau[i], r));
    }
    return best;
}

// ---------------------------------------------------------------------------------------------
// entropy conditions and weak form

using Profile = std::function<double(double)>;
using ProfileXT = std::function<double(double, double)>;

struct EntropyReport {
    bool interior = true;        // E_i at every detected jump away from 0
    bool boundary = true;        // E_b at x = 0
    bool flux_match = true;      // residual below tolerance
    double flux_residual = 0.0;  // |c1 h(rho(0-)) - c2 h(rho(0+))|
    double rho_left = 0.0;
    double rho_right = 0.0;
    std::vector<double> jumps;
    std::vector<std::string> violations;

    bool pass() const { return interior && boundary && flux_match; }
};

inline double flux_h(double rho) { return rho * (1.0 - rho); }

/// E_i, E_b and flux matching for a profile at time t.
inline EntropyReport entropy_check(const Profile& rho, double c1, double c2, double t, double flux_tol = 1e-10,
                                   int points = 20001) {
    EntropyReport rep;
    const double L = 2.0 * std::max(c1, c2) * t + 1.0;
    const double eps0 = 1e-13 * (1.0 + t);
    rep.rho_left = rho(-eps0);
    rep.rho_right = rho(eps0);
    rep.flux_residual = std::abs(c1 * flux_h(rep.rho_left) - c2 * flux_h(rep.rho_right));
    rep.flux_match = rep.flux_residual <= flux_tol;
    if (!rep.flux_match) rep.violations.push_back("flux mismatch at x=0: " + std::to_string(rep.flux_residual));
    const double fr = c2 * (1.0 - 2.0 * rep.rho_right), fl = c1 * (1.0 - 2.0 * rep.rho_left);
    const double tol = 1e-12;
    const bool eb1 = fr >= -tol && fl >= -tol;
    const bool eb2 = fr <= tol && fl <= tol;
    const bool eb3 = fr <= tol && fl >= -tol;
    rep.boundary = eb1 || eb2 || eb3;
    if (!rep.boundary) rep.violations.push_back("boundary entropy condition fails at x=0");
    const double dx = 2.0 * L / (points - 1);
    const double jump_tol = 1e-2;
    double prev = rho(-L);
    for (int k = 1; k < points; ++k) {
        const double xa = -L + (k - 1) * dx, xb = -L + k * dx;
        const double cur = rho(xb);
        if (std::abs(cur - prev) > jump_tol && !(xa <= 0 && xb >= 0)) {
            // locate the jump
            double a = xa, b = xb;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                const double rm = rho(m);
                if (std::abs(rm - prev) >= std::abs(cur - rm)) b = m; else a = m;
            }
            const double left = rho(a), right = rho(b);
            if (std::abs(right - left) > jump_tol) {
                rep.jumps.push_back(0.5 * (a + b));
                if (right < left - 1e-12) {
                    rep.interior = false;
                    rep.violations.push_back("decreasing jump at x=" + std::to_string(0.5 * (a + b)));
                }
            }
        }
        prev = cur;
    }
    return rep;
}

/// Smooth compactly supported bump b((x-x0)/wx) b((t-t0)/wt), b(s) = exp(-1/(1-s^2)).
struct BumpFunction {
    double x0, t0, wx, wt;

    static double b(double s) { return std::abs(s) < 1 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }
    static double db(double s) {
        if (std::abs(s) >= 1) return 0.0;
        const double u = 1.0 - s * s;
        return b(s) * (-2.0 * s / (u * u));
    }
    double operator()(double x, double t) const { return b((x - x0) / wx) * b((t - t0) / wt); }
    double dx(double x, double t) const { return db((x - x0) / wx) / wx * b((t - t0) / wt); }
    double dt(double x, double t) const { return b((x - x0) / wx) * db((t - t0) / wt) / wt; }
};

/// Three bumps scaled to the fan width: one touching t = 0, one left of the interface, one right of it.
inline std::vector<BumpFunction> standard_bumps(double c1, double c2, double t) {
    const double L = std::max(c1, c2) * t;
    return {{0.0, 0.2 * t, 0.5 * L, 0.4 * t}, {-0.15 * L, t, 0.3 * L, 0.5 * t}, {0.1 * L, t, 0.3 * L, 0.5 * t}};
}

struct WeakResidual {
    double value = 0.0;
    bool shock_warning = false;  // some quadrature cell had to be split at a detected discontinuity
};

/// int int (rho phi_t + F(x,rho) phi_x) dx dt + int rho0(x) phi(x,0) dx with F = c(x) rho(1-rho),
/// c = c1 on x < 0 and c2 on x > 0. Cells are split at x = 0 and at detected jumps of rho.
inline WeakResidual weak_solution_residual(const ProfileXT& rho, const Profile& rho0, double c1, double c2,
                                           const BumpFunction& phi, int quad = 400) {
    WeakResidual out;
    const double xlo = phi.x0 - phi.wx, xhi = phi.x0 + phi.wx;
    const double tlo = std::max(0.0, phi.t0 - phi.wt), thi = phi.t0 + phi.wt;
    if (!(thi > 0)) return out;
    std::vector<double> xs = convex::linspace(xlo, xhi, quad + 1);
    if (xlo < 0 && xhi > 0) {
        xs.push_back(0.0);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    }
    constexpr double gl = 0.57735026918962576451;
    auto integrate_x = [&](const std::function<double(double)>& dens, const std::function<double(double)>& integrand) {
        double acc = 0.0;
        for (std::size_t k = 1; k < xs.size(); ++k) {
            double a = xs[k - 1], b = xs[k];
            const double ra = dens(a + 1e-14 * (b - a)), rb = dens(b - 1e-14 * (b - a));
            std::vector<std::array<double, 2>> parts;
            if (std::abs(rb - ra) > 1e-3) {
                double l = a, r = b;
                for (int it = 0; it < 60; ++it) {
                    const double m = 0.5 * (l + r);
                    const double rm = dens(m);
                    if (std::abs(rm - ra) >= std::abs(rb - rm)) r = m; else l = m;
                }
                const double cut = 0.5 * (l + r);
                parts = {{a, cut}, {cut, b}};
                out.shock_warning = true;
            } else {
                parts = {{a, b}};
            }
            for (const auto& pr : parts) {
                const double m = 0.5 * (pr[0] + pr[1]), hw = 0.5 * (pr[1] - pr[0]);
                if (hw <= 0) continue;
                acc += hw * (integrand(m - gl * hw) + integrand(m + gl * hw));
            }
        }
        return acc;
    };
    double total = 0.0;
    const int nt = quad;
    const double dtc = (thi - tlo) / nt;
    for (int k = 0; k < nt; ++k) {
        for (double off : {-gl, gl}) {
            const double t = tlo + (k + 0.5) * dtc + off * 0.5 * dtc;
            auto dens = [&](double x) { return rho(x, t); };
            auto integrand = [&](double x) {
                const double r = rho(x, t);
                const double F = (x < 0 ? c1 : c2) * flux_h(r);
                return r * phi.dt(x, t) + F * phi.dx(x, t);
            };
            total += 0.5 * dtc * integrate_x(dens, integrand);
        }
    }
    if (tlo == 0.0) total += integrate_x(rho0, [&](double x) { return rho0(x) * phi(x, 0.0); });
    out.value = total;
    return out;
}

} // namespace growthlab::hydro
