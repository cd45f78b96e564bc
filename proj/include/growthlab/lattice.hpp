#pragma once

#include <growthlab/env.hpp>
#include <growthlab/errors.hpp>
#include <growthlab/specfun.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace growthlab::lattice {

using env::Region;
using env::WeightGrid;

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline double logsumexp(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// log C(a+b, a)
inline double log_binomial(int a, int b) {
    return specfun::log_gamma(a + b + 1.0) - specfun::log_gamma(a + 1.0) - specfun::log_gamma(b + 1.0);
}

struct Site {
    int i;
    int j;
    bool operator==(const Site&) const = default;
};

enum class StepSet { up_right, wedge };

struct LatticePath {
    std::vector<Site> sites;
    StepSet steps = StepSet::up_right;
    bool tie = false;

    bool valid() const {
        for (std::size_t k = 1; k < sites.size(); ++k) {
            const int di = sites[k].i - sites[k - 1].i, dj = sites[k].j - sites[k - 1].j;
            const bool ok = (di == 1 && dj == 0) || (di == 0 && dj == 1) || (steps == StepSet::wedge && di == -1 && dj == 1);
            if (!ok) return false;
        }
        return true;
    }
};

struct PassageField {
    Region region;
    std::vector<double> T;
    bool include_origin = false;

    double at(int i, int j) const { return T[region.index(i, j)]; }
};

namespace detail {

inline void require_rectangle(const Region& r, const char* who) {
    if (r.kind != Region::Kind::rectangle) throw RegionError(std::string(who) + ": rectangle region required");
}

} // namespace detail

/// Last-passage times. Rectangle: T(i,j) = max(T(i-1,j), T(i,j-1)) + w(i,j), T(0,0) = w(0,0) if the origin
/// weight is included and 0 otherwise. Wedge: predecessors (i-1,j), (i,j-1), (i+1,j-1), T = 0 on the
/// boundary of the wedge; paths stay inside the (possibly truncated) region.
inline PassageField last_passage(const WeightGrid& grid, bool include_origin = false) {
    const Region& R = grid.region;
    if (grid.values.size() != R.size()) throw RegionError("last_passage: values do not match the region");
    PassageField f{R, std::vector<double>(R.size(), 0.0), include_origin};
    if (R.kind == Region::Kind::rectangle) {
        for (int j = 0; j <= R.n; ++j)
            for (int i = 0; i <= R.m; ++i) {
                const double w = grid.at(i, j);
                if (i == 0 && j == 0) {
                    f.T[0] = include_origin ? w : 0.0;
                    continue;
                }
                double best = neg_inf;
                if (i > 0) best = f.at(i - 1, j);
                if (j > 0) best = std::max(best, f.at(i, j - 1));
                f.T[R.index(i, j)] = best + w;
            }
        return f;
    }
    auto value = [&](int i, int j) {
        if (j <= 0 || i <= -j) return 0.0;  // boundary of the wedge
        if (!R.contains(i, j)) return neg_inf;
        return f.at(i, j);
    };
    for (int j = 1; j <= R.rows(); ++j)
        for (int i = R.row_lo(j); i <= R.row_end(j); ++i) {
            const double best = std::max({value(i - 1, j), value(i, j - 1), value(i + 1, j - 1)});
            f.T[R.index(i, j)] = best + grid.at(i, j);
        }
    return f;
}

/// Terminal value T(m,n) on the rectangle with weights w(i,j), O(m) memory.
template <class W>
double last_passage_value(int m, int n, W&& w, bool include_origin = false) {
    std::vector<double> row(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= m; ++i) {
            const double wt = w(i, j);
            if (i == 0 && j == 0) {
                row[0] = include_origin ? wt : 0.0;
            } else if (j == 0) {
                row[i] = row[i - 1] + wt;
            } else if (i == 0) {
                row[0] += wt;
            } else {
                row[i] = std::max(row[i - 1], row[i]) + wt;
            }
        }
    return row[static_cast<std::size_t>(m)];
}

/// Wedge region holding exactly the backward light cone of (i,j).
inline Region wedge_cone(int i, int j) {
    std::vector<int> hi(static_cast<std::size_t>(j));
    for (int r = 1; r <= j; ++r) hi[static_cast<std::size_t>(r - 1)] = i + (j - r);
    return Region::wedge(std::move(hi));
}

/// Maximal path ending at the endpoint. Ties prefer the horizontal predecessor and set the tie flag.
inline LatticePath max_path_backtrace(const PassageField& field, const WeightGrid& grid, Site end) {
    const Region& R = field.region;
    if (!(R == grid.region) || !R.contains(end.i, end.j)) throw RegionError("max_path_backtrace: endpoint outside region");
    LatticePath path;
    path.steps = R.kind == Region::Kind::rectangle ? StepSet::up_right : StepSet::wedge;
    Site cur = end;
    path.sites.push_back(cur);
    if (R.kind == Region::Kind::rectangle) {
        while (cur.i > 0 || cur.j > 0) {
            if (cur.i == 0) {
                --cur.j;
            } else if (cur.j == 0) {
                --cur.i;
            } else {
                const double h = field.at(cur.i - 1, cur.j), v = field.at(cur.i, cur.j - 1);
                if (h == v) path.tie = true;
                if (h >= v) --cur.i; else --cur.j;
            }
            path.sites.push_back(cur);
        }
    } else {
        for (;;) {
            const std::array<Site, 3> preds{Site{cur.i - 1, cur.j}, Site{cur.i, cur.j - 1}, Site{cur.i + 1, cur.j - 1}};
            double best = neg_inf;
            std::optional<Site> arg;
            int attained = 0;
            for (const Site& p : preds) {
                const bool on_boundary = p.j <= 0 || p.i <= -p.j;
                if (!on_boundary && !R.contains(p.i, p.j)) continue;
                const double v = on_boundary ? 0.0 : field.at(p.i, p.j);
                if (v > best) {
                    best = v;
                    arg = on_boundary ? std::nullopt : std::optional<Site>(p);
                    attained = 1;
                } else if (v == best) {
                    ++attained;
                }
            }
            if (attained > 1) path.tie = true;
            if (!arg) break;
            cur = *arg;
            path.sites.push_back(cur);
        }
    }
    std::reverse(path.sites.begin(), path.sites.end());
    return path;
}

/// Sum of weights along a path, skipping the rectangle origin unless included.
inline double path_weight(const LatticePath& p, const WeightGrid& grid, bool include_origin = false) {
    double s = 0.0;
    for (const Site& v : p.sites) {
        if (grid.region.kind == Region::Kind::rectangle && v.i == 0 && v.j == 0 && !include_origin) continue;
        s += grid.at(v.i, v.j);
    }
    return s;
}

struct LogPartitionField {
    Region region;
    double beta = 1.0;
    std::vector<double> logZ;
    bool include_origin = false;

    double at(int i, int j) const { return logZ[region.index(i, j)]; }
};

/// log Z(i,j) = beta w(i,j) + logsumexp(log Z(i-1,j), log Z(i,j-1)), log Z(0,0) = beta w(0,0) or 0.
inline LogPartitionField log_partition(const WeightGrid& grid, double beta, bool include_origin = false) {
    if (!(beta >= 0)) throw ParameterError("log_partition: beta must be >= 0");
    const Region& R = grid.region;
    detail::require_rectangle(R, "log_partition");
    LogPartitionField f{R, beta, std::vector<double>(R.size(), 0.0), include_origin};
    for (int j = 0; j <= R.n; ++j)
        for (int i = 0; i <= R.m; ++i) {
            const double w = beta * grid.at(i, j);
            if (i == 0 && j == 0) {
                f.logZ[0] = include_origin ? w : 0.0;
                continue;
            }
            double acc = neg_inf;
            if (i > 0) acc = f.at(i - 1, j);
            if (j > 0) acc = logsumexp(acc, f.at(i, j - 1));
            f.logZ[R.index(i, j)] = acc + w;
        }
    return f;
}

/// Last row {log Z(i, n)}_{i=0..m} with weights w(i,j), O(m) memory.
template <class W>
std::vector<double> log_partition_last_row(int m, int n, W&& w, double beta, bool include_origin = false) {
    std::vector<double> row(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= m; ++i) {
            const double wt = beta * w(i, j);
            if (i == 0 && j == 0) row[0] = include_origin ? wt : 0.0;
            else if (j == 0) row[i] = row[i - 1] + wt;
            else if (i == 0) row[0] += wt;
            else row[i] = logsumexp(row[i - 1], row[i]) + wt;
        }
    return row;
}

template <class W>
double log_partition_value(int m, int n, W&& w, double beta, bool include_origin = false) {
    return log_partition_last_row(m, n, std::forward<W>(w), beta, include_origin)[static_cast<std::size_t>(m)];
}

/// log Z^tot(level) = logsumexp of log Z over the anti-diagonal i + j = level.
inline double free_endpoint_log_partition(const LogPartitionField& f, int level) {
    detail::require_rectangle(f.region, "free_endpoint_log_partition");
    if (level < 0 || level > f.region.m || level > f.region.n)
        throw RegionError("free_endpoint_log_partition: region must contain the whole anti-diagonal");
    double acc = neg_inf;
    for (int i = 0; i <= level; ++i) acc = logsumexp(acc, f.at(i, level - i));
    return acc;
}

struct EndpointProbability {
    Site site;
    double p;
};

inline std::vector<EndpointProbability> quenched_endpoint_distribution(const LogPartitionField& f, int level) {
    const double total = free_endpoint_log_partition(f, level);
    std::vector<EndpointProbability> out;
    out.reserve(static_cast<std::size_t>(level) + 1);
    for (int i = 0; i <= level; ++i) out.push_back({{i, level - i}, std::exp(f.at(i, level - i) - total)});
    return out;
}

/// Exact backward sampling from the quenched measure. With no endpoint, the endpoint on the
/// anti-diagonal `level` is drawn first.
template <class G>
LatticePath sample_quenched_path(const LogPartitionField& f, std::optional<Site> endpoint, int level, G& rng) {
    detail::require_rectangle(f.region, "sample_quenched_path");
    Site cur{};
    if (endpoint) {
        cur = *endpoint;
        if (!f.region.contains(cur.i, cur.j)) throw RegionError("sample_quenched_path: endpoint outside region");
    } else {
        const auto probs = quenched_endpoint_distribution(f, level);
        double u = env::uniform01(rng);
        cur = probs.back().site;
        for (const auto& e : probs) {
            if (u < e.p) {
                cur = e.site;
                break;
            }
            u -= e.p;
        }
    }
    LatticePath path;
    path.sites.push_back(cur);
    while (cur.i > 0 || cur.j > 0) {
        if (cur.i == 0) {
            --cur.j;
        } else if (cur.j == 0) {
            --cur.i;
        } else {
            const double a = f.at(cur.i - 1, cur.j), b = f.at(cur.i, cur.j - 1);
            const double p_horizontal = 1.0 / (1.0 + std::exp(b - a));
            if (env::uniform01(rng) < p_horizontal) --cur.i; else --cur.j;
        }
        path.sites.push_back(cur);
    }
    std::reverse(path.sites.begin(), path.sites.end());
    return path;
}

struct GapRow {
    double beta;
    double gap;     // log Z / beta - T
    double q_max;   // quenched probability of the maximal path
};

inline std::vector<GapRow> zero_temperature_gap(const WeightGrid& grid, Site end, const std::vector<double>& betas,
                                                bool include_origin = false) {
    const PassageField pf = last_passage(grid, include_origin);
    const double T = pf.at(end.i, end.j);
    std::vector<GapRow> rows;
    for (double beta : betas) {
        if (!(beta > 0)) throw ParameterError("zero_temperature_gap: beta must be positive");
        const LogPartitionField lf = log_partition(grid, beta, include_origin);
        const double lz = lf.at(end.i, end.j);
        rows.push_back({beta, lz / beta - T, std::exp(beta * T - lz)});
    }
    return rows;
}

/// Macroscopic up-right path from the origin, piecewise linear through its vertices.
using QuadrantPath = std::vector<std::array<double, 2>>;

enum class Endpoint { free, constrained };

/// p(d^-1 1) - sum p(segment) for the free endpoint, p(gamma(1)) - sum p(segment) otherwise.
inline double path_rate_functional(const QuadrantPath& gamma, const std::function<double(double, double)>& p,
                                   Endpoint kind) {
    if (gamma.size() < 2) throw PathError("path_rate_functional: need at least two vertices");
    if (gamma.front()[0] != 0.0 || gamma.front()[1] != 0.0) throw PathError("path_rate_functional: path must start at 0");
    double sum = 0.0;
    for (std::size_t k = 1; k < gamma.size(); ++k) {
        const double dx = gamma[k][0] - gamma[k - 1][0], dy = gamma[k][1] - gamma[k - 1][1];
        if (dx < 0 || dy < 0) throw PathError("path_rate_functional: path is not coordinatewise nondecreasing");
        if (dx == 0 && dy == 0) continue;
        sum += p(dx, dy);
    }
    const auto& last = gamma.back();
    if (kind == Endpoint::free) {
        if (std::abs(last[0] + last[1] - 1.0) > 1e-12) throw PathError("path_rate_functional: free endpoint needs |gamma(1)| = 1");
        return p(0.5, 0.5) - sum;
    }
    return p(last[0], last[1]) - sum;
}

} // namespace growthlab::lattice
