#pragma once

#include <growthlab/errors.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace growthlab::convex {

/// +inf sentinel. It dominates sums; sup ignores -inf.
inline constexpr double inf = std::numeric_limits<double>::infinity();

inline double add(double a, double b) {
    if (a == inf || b == inf) return inf;
    return a + b;
}

struct Maximum {
    double x;
    double value;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <class F>
Maximum golden_max(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 300) {
    constexpr double r = 0.61803398874989484820;
    if (hi < lo) std::swap(lo, hi);
    double a = lo, b = hi;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    Maximum best = f1 >= f2 ? Maximum{x1, f1} : Maximum{x2, f2};
    const double fa = f(lo), fb = f(hi);
    if (fa > best.value) best = {lo, fa};
    if (fb > best.value) best = {hi, fb};
    return best;
}

/// Uniform grid scan on [lo, hi] followed by golden-section refinement around the best node.
template <class F>
Maximum grid_golden_max(F&& f, double lo, double hi, int points = 201, double tol = 1e-10) {
    if (points < 3) points = 3;
    const double h = (hi - lo) / (points - 1);
    int best = 0;
    double best_val = -inf;
    for (int k = 0; k < points; ++k) {
        const double v = f(lo + k * h);
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    if (best_val == -inf) return {lo, -inf};
    const double a = lo + std::max(best - 1, 0) * h;
    const double b = lo + std::min(best + 1, points - 1) * h;
    Maximum m = golden_max(f, a, b, tol);
    if (best_val > m.value) m = {lo + best * h, best_val};
    return m;
}

/// Function sampled on a strictly increasing grid; +inf marks points outside the effective domain.
/// domain_lo/domain_hi give the true domain, which may extend beyond the grid.
struct GridFunction {
    std::vector<double> xs;
    std::vector<double> ys;
    double domain_lo = -inf;
    double domain_hi = inf;

    void validate() const {
        if (xs.size() != ys.size() || xs.size() < 2) throw ParameterError("GridFunction: need |xs| = |ys| >= 2");
        for (std::size_t k = 1; k < xs.size(); ++k)
            if (!(xs[k] > xs[k - 1])) throw ParameterError("GridFunction: xs must be strictly increasing");
        std::size_t k = 0;
        while (k < ys.size() && ys[k] == inf) ++k;
        while (k < ys.size() && ys[k] != inf) {
            if (std::isnan(ys[k])) throw ParameterError("GridFunction: NaN value");
            ++k;
        }
        while (k < ys.size() && ys[k] == inf) ++k;
        if (k != ys.size()) throw ParameterError("GridFunction: +inf entries allowed only at domain edges");
    }

    bool finite_somewhere() const {
        return std::any_of(ys.begin(), ys.end(), [](double y) { return y != inf; });
    }

    /// Linear interpolation; +inf outside the grid or next to a +inf node.
    double operator()(double x) const {
        if (!(x >= xs.front() && x <= xs.back())) return inf;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t k = it == xs.end() ? xs.size() - 1 : static_cast<std::size_t>(it - xs.begin());
        if (k == 0) k = 1;
        const double x0 = xs[k - 1], x1 = xs[k];
        if (x == x0) return ys[k - 1];
        if (x == x1) return ys[k];
        if (ys[k - 1] == inf || ys[k] == inf) return inf;
        const double w = (x - x0) / (x1 - x0);
        return (1.0 - w) * ys[k - 1] + w * ys[k];
    }

    template <class F>
    static GridFunction sample(F&& f, double lo, double hi, int points = 2001, double dlo = -inf,
                               double dhi = inf) {
        GridFunction g;
        g.xs.resize(points);
        g.ys.resize(points);
        for (int k = 0; k < points; ++k) {
            g.xs[k] = lo + (hi - lo) * k / (points - 1);
            g.ys[k] = f(g.xs[k]);
        }
        g.domain_lo = dlo;
        g.domain_hi = dhi;
        return g;
    }
};

inline std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> v(points);
    for (int k = 0; k < points; ++k) v[k] = lo + (hi - lo) * k / (points - 1);
    return v;
}

/// f*(r) = sup_x { r x - f(x) } over the grid points of f. A slope whose maximizer sits on a grid edge
/// that truncates a larger domain (strictly better than its neighbour) is reported +inf.
inline GridFunction legendre(const GridFunction& f, std::span<const double> slopes) {
    f.validate();
    if (!f.finite_somewhere()) throw EmptyDomainError("legendre: f is +inf everywhere");
    GridFunction out;
    out.xs.assign(slopes.begin(), slopes.end());
    out.ys.resize(slopes.size());
    std::size_t first = 0, last = f.ys.size() - 1;
    while (f.ys[first] == inf) ++first;
    while (f.ys[last] == inf) --last;
    const bool open_left = f.domain_lo < f.xs[first];
    const bool open_right = f.domain_hi > f.xs[last];
    for (std::size_t s = 0; s < slopes.size(); ++s) {
        const double r = slopes[s];
        double best = -inf;
        std::size_t arg = first;
        for (std::size_t k = first; k <= last; ++k) {
            const double v = r * f.xs[k] - f.ys[k];
            if (v > best) {
                best = v;
                arg = k;
            }
        }
        const double tol = 1e-12 * (1.0 + std::abs(best));
        if (first < last) {
            if (open_left && arg == first && best > r * f.xs[first + 1] - f.ys[first + 1] + tol) best = inf;
            if (open_right && arg == last && best > r * f.xs[last - 1] - f.ys[last - 1] + tol) best = inf;
        }
        out.ys[s] = best;
    }
    out.domain_lo = out.xs.front();
    out.domain_hi = out.xs.back();
    return out;
}

/// (f box g)(x) = inf_y { f(y) + g(x - y) } on x_grid.
inline GridFunction inf_convolve(const GridFunction& f, const GridFunction& g, std::span<const double> x_grid) {
    f.validate();
    g.validate();
    if (!f.finite_somewhere() || !g.finite_somewhere()) throw EmptyDomainError("inf_convolve: empty domain");
    GridFunction out;
    out.xs.assign(x_grid.begin(), x_grid.end());
    out.ys.assign(x_grid.size(), inf);
    for (std::size_t s = 0; s < x_grid.size(); ++s) {
        const double x = x_grid[s];
        double best = inf;
        for (std::size_t k = 0; k < f.xs.size(); ++k) {
            if (f.ys[k] == inf) continue;
            best = std::min(best, add(f.ys[k], g(x - f.xs[k])));
        }
        for (std::size_t k = 0; k < g.xs.size(); ++k) {
            if (g.ys[k] == inf) continue;
            best = std::min(best, add(g.ys[k], f(x - g.xs[k])));
        }
        out.ys[s] = best;
    }
    out.domain_lo = add(f.domain_lo, g.domain_lo);
    out.domain_hi = f.domain_hi + g.domain_hi;
    return out;
}

/// Limiting log-moment generating function, finite on (u_min, u_max).
struct LogMgf {
    std::function<double(double)> eval;
    double u_max = inf;
    double u_min = -inf;
};

enum class Tail { upper, lower };

/// Upper: sup_{u >= 0} {a u - M(u)}. Lower: sup_{u <= 0} {a u - M(u)}.
inline double cramer_one_sided(const LogMgf& M, double a, Tail side) {
    if (!M.eval) throw ParameterError("cramer_one_sided: missing evaluator");
    const double sign = side == Tail::upper ? 1.0 : -1.0;
    const double edge = side == Tail::upper ? M.u_max : -M.u_min;
    // objective in v = |u|
    auto phi = [&](double v) {
        const double m = M.eval(sign * v);
        if (!std::isfinite(m)) return -inf;
        return a * sign * v - m;
    };
    double hi;
    if (std::isfinite(edge)) {
        hi = edge * (1.0 - 1e-12);
    } else {
        hi = 1.0;
        while (phi(hi) >= phi(0.5 * hi)) {
            hi *= 2.0;
            if (hi > 1e12) throw DivergenceError("cramer_one_sided: supremum is unbounded");
        }
    }
    return std::max(0.0, grid_golden_max(phi, 0.0, hi, 201, 1e-12).value);
}

/// inf over x in [a_lo, r - a_hi] of lambda(x) + phi(r - x), on a uniform grid of that interval.
template <class L, class P>
double sum_rate(L&& lambda, P&& phi, double r, double a_lo, double a_hi, int points = 2001) {
    const double lo = a_lo, hi = r - a_hi;
    if (hi < lo) return inf;
    double best = inf;
    for (int k = 0; k < points; ++k) {
        const double x = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
        best = std::min(best, add(lambda(x), phi(r - x)));
    }
    return best;
}

} // namespace growthlab::convex
