#pragma once

#include <growthlab/errors.hpp>

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace growthlab::env {

// ---------------------------------------------------------------------------------------------
// speed functions

/// Piecewise-constant, lower semicontinuous jump-rate profile c(x).
class SpeedFunction {
public:
    SpeedFunction() : SpeedFunction(constant(1.0)) {}

    SpeedFunction(std::vector<double> breakpoints, std::vector<double> rates)
        : breaks_(std::move(breakpoints)), rates_(std::move(rates)) {
        if (rates_.size() != breaks_.size() + 1)
            throw ParameterError("SpeedFunction: need one more rate than breakpoints");
        for (double r : rates_)
            if (!(r > 0) || !std::isfinite(r)) throw ParameterError("SpeedFunction: rates must be positive");
        for (std::size_t k = 0; k < breaks_.size(); ++k) {
            if (!std::isfinite(breaks_[k])) throw ParameterError("SpeedFunction: breakpoints must be finite");
            if (k > 0 && !(breaks_[k] > breaks_[k - 1]))
                throw ParameterError("SpeedFunction: breakpoints must be strictly increasing");
        }
    }

    static SpeedFunction constant(double c) { return SpeedFunction(std::vector<double>{}, std::vector<double>{c}); }

    /// c1 on x < 0, c2 on x > 0.
    static SpeedFunction two_phase(double c1, double c2) { return SpeedFunction({0.0}, {c1, c2}); }

    double operator()(double x) const {
        auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - breaks_.begin());
        if (it != breaks_.end() && *it == x) return std::min(rates_[k], rates_[k + 1]);
        return rates_[k];
    }

    /// Same profile translated so that the result at x equals this at x - q.
    SpeedFunction shifted(double q) const {
        std::vector<double> b = breaks_;
        for (double& v : b) v += q;
        return SpeedFunction(std::move(b), rates_);
    }

    /// Profile x -> c(-x), used by the particle-hole reflection.
    SpeedFunction reflected() const {
        std::vector<double> b(breaks_.rbegin(), breaks_.rend());
        for (double& v : b) v = -v;
        return SpeedFunction(std::move(b), std::vector<double>(rates_.rbegin(), rates_.rend()));
    }

    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<double>& rates() const { return rates_; }
    double max_rate() const { return *std::max_element(rates_.begin(), rates_.end()); }
    double min_rate() const { return *std::min_element(rates_.begin(), rates_.end()); }
    bool is_constant() const { return breaks_.empty(); }

    nlohmann::json to_json() const { return {{"breakpoints", breaks_}, {"rates", rates_}}; }
    static SpeedFunction from_json(const nlohmann::json& j) {
        return SpeedFunction(j.at("breakpoints").get<std::vector<double>>(), j.at("rates").get<std::vector<double>>());
    }

private:
    std::vector<double> breaks_;
    std::vector<double> rates_;
};

inline double speed_at(const SpeedFunction& c, double x) { return c(x); }

// ---------------------------------------------------------------------------------------------
// counter-based random numbers

struct RngSpec {
    std::uint64_t base_seed = 0;
    std::uint64_t stream_id = 0;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

inline constexpr std::uint64_t encode(std::int64_t v) { return static_cast<std::uint64_t>(v); }

/// Key of the random stream attached to one lattice site.
inline constexpr std::uint64_t site_key(const RngSpec& rng, std::int64_t i, std::int64_t j = 0) {
    return mix(mix(mix(mix(0x6a09e667f3bcc909ULL, rng.base_seed), rng.stream_id), encode(i)), encode(j));
}

/// SplitMix64 sequence started from a key. Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}
    CounterRng(const RngSpec& rng, std::int64_t i, std::int64_t j = 0) : CounterRng(site_key(rng, i, j)) {}
    explicit CounterRng(const RngSpec& rng) : CounterRng(site_key(rng, -0x7fffffff, -0x7fffffff)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

/// Uniform on the open interval (0, 1).
template <class G>
double uniform01(G& g) {
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

template <class G>
double exponential(G& g, double rate = 1.0) {
    return -std::log(uniform01(g)) / rate;
}

template <class G>
double standard_normal(G& g) {
    const double u1 = uniform01(g), u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Gamma(shape, 1) by Marsaglia-Tsang rejection; shape < 1 via the U^{1/shape} boost.
template <class G>
double gamma(G& g, double shape) {
    if (!(shape > 0)) throw ParameterError("gamma: shape must be positive");
    if (shape < 1.0) {
        const double x = gamma(g, shape + 1.0);
        return x * std::exp(std::log(uniform01(g)) / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = standard_normal(g);
            v = 1.0 + c * z;
        } while (v <= 0);
        v = v * v * v;
        const double u = uniform01(g);
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// ---------------------------------------------------------------------------------------------
// regions and weight grids

/// Rectangle {0..m} x {0..n}, or the wedge {(i,j): 1 <= j <= rows, -j+1 <= i <= row_hi[j-1]}.
struct Region {
    enum class Kind { rectangle, wedge };
    Kind kind = Kind::rectangle;
    int m = 0;
    int n = 0;
    std::vector<int> row_hi;
    std::vector<std::size_t> offsets;

    static Region rectangle(int m, int n) {
        if (m < 0 || n < 0) throw RegionError("rectangle: negative size");
        Region r;
        r.m = m;
        r.n = n;
        return r;
    }

    static Region wedge(std::vector<int> row_hi) {
        Region r;
        r.kind = Kind::wedge;
        r.row_hi = std::move(row_hi);
        r.offsets.assign(r.row_hi.size() + 1, 0);
        for (std::size_t j = 1; j <= r.row_hi.size(); ++j) {
            const int lo = -static_cast<int>(j) + 1;
            if (r.row_hi[j - 1] < lo) throw RegionError("wedge: row extent below the wedge boundary");
            r.offsets[j] = r.offsets[j - 1] + static_cast<std::size_t>(r.row_hi[j - 1] - lo + 1);
        }
        return r;
    }

    static Region wedge(int rows, int i_hi) { return wedge(std::vector<int>(static_cast<std::size_t>(rows), i_hi)); }

    int rows() const { return kind == Kind::rectangle ? n : static_cast<int>(row_hi.size()); }
    int row_lo(int j) const { return kind == Kind::rectangle ? 0 : -j + 1; }
    int row_end(int j) const { return kind == Kind::rectangle ? m : row_hi[static_cast<std::size_t>(j - 1)]; }
    int first_row() const { return kind == Kind::rectangle ? 0 : 1; }

    std::size_t size() const {
        return kind == Kind::rectangle ? static_cast<std::size_t>(m + 1) * static_cast<std::size_t>(n + 1)
                                       : offsets.back();
    }

    bool contains(int i, int j) const {
        if (kind == Kind::rectangle) return i >= 0 && i <= m && j >= 0 && j <= n;
        return j >= 1 && j <= rows() && i >= -j + 1 && i <= row_hi[static_cast<std::size_t>(j - 1)];
    }

    std::size_t index(int i, int j) const {
        if (kind == Kind::rectangle)
            return static_cast<std::size_t>(j) * static_cast<std::size_t>(m + 1) + static_cast<std::size_t>(i);
        return offsets[static_cast<std::size_t>(j - 1)] + static_cast<std::size_t>(i + j - 1);
    }

    bool operator==(const Region& o) const { return kind == o.kind && m == o.m && n == o.n && row_hi == o.row_hi; }

    nlohmann::json to_json() const {
        if (kind == Kind::rectangle) return {{"kind", "rectangle"}, {"m", m}, {"n", n}};
        return {{"kind", "wedge"}, {"row_hi", row_hi}};
    }
    static Region from_json(const nlohmann::json& j) {
        if (j.at("kind") == "rectangle") return rectangle(j.at("m").get<int>(), j.at("n").get<int>());
        return wedge(j.at("row_hi").get<std::vector<int>>());
    }
};

enum class Distribution { exponential, log_gamma, log_gamma_stationary };

inline const char* to_string(Distribution d) {
    switch (d) {
    case Distribution::exponential: return "exponential";
    case Distribution::log_gamma: return "log_gamma";
    case Distribution::log_gamma_stationary: return "log_gamma_stationary";
    }
    return "?";
}

inline Distribution distribution_from_string(const std::string& s) {
    if (s == "exponential") return Distribution::exponential;
    if (s == "log_gamma") return Distribution::log_gamma;
    if (s == "log_gamma_stationary") return Distribution::log_gamma_stationary;
    throw ParameterError("unknown distribution " + s);
}

/// Site values of a random environment plus everything needed to regenerate them.
/// Exponential grids hold the passage weights; log-gamma grids hold omega = log Y.
struct WeightGrid {
    Region region;
    std::vector<double> values;
    Distribution distribution = Distribution::exponential;
    SpeedFunction speed;
    int shift = 0;
    int scale = 1;
    double mu = 0.0;
    double theta = 0.0;
    RngSpec rng;

    double at(int i, int j) const { return values[region.index(i, j)]; }
    double& at(int i, int j) { return values[region.index(i, j)]; }

    nlohmann::json metadata() const {
        return {{"distribution", to_string(distribution)},
                {"region", region.to_json()},
                {"speed", speed.to_json()},
                {"shift", shift},
                {"scale", scale},
                {"mu", mu},
                {"theta", theta},
                {"seed", rng.base_seed},
                {"stream", rng.stream_id}};
    }
};

/// Rate of the exponential weight at (i,j). Wedge sites use the column i; rectangle sites use the
/// diagonal offset i - j, the corner-growth picture of the same model.
inline double exponential_rate(const SpeedFunction& c, int n, int shift, Region::Kind kind, int i, int j) {
    const int col = kind == Region::Kind::wedge ? i : i - j;
    return c(static_cast<double>(col - shift) / n);
}

inline double exponential_weight(const RngSpec& rng, double rate, int i, int j) {
    CounterRng g(rng, i, j);
    return exponential(g, rate);
}

inline WeightGrid sample_exponential_grid(const SpeedFunction& c, int n, int shift, const Region& region,
                                          const RngSpec& rng) {
    if (n < 1) throw ParameterError("sample_exponential_grid: n must be >= 1");
    WeightGrid g;
    g.region = region;
    g.distribution = Distribution::exponential;
    g.speed = c;
    g.shift = shift;
    g.scale = n;
    g.rng = rng;
    g.values.assign(region.size(), 0.0);
    for (int j = region.first_row(); j <= region.rows(); ++j)
        for (int i = region.row_lo(j); i <= region.row_end(j); ++i)
            g.at(i, j) = exponential_weight(rng, exponential_rate(c, n, shift, region.kind, i, j), i, j);
    return g;
}

/// omega = log Y with 1/Y ~ Gamma(shape).
inline double log_inverse_gamma(const RngSpec& rng, double shape, int i, int j) {
    CounterRng g(rng, i, j);
    return -std::log(gamma(g, shape));
}

/// Log-gamma weight at (i,j): bulk 1/Y ~ Gamma(mu); with a boundary, 1/U ~ Gamma(theta) on the
/// bottom row, 1/V ~ Gamma(mu - theta) on the left column and Y(0,0) = 1.
inline double loggamma_weight(const RngSpec& rng, double mu, double theta, bool with_boundary, int i, int j) {
    if (with_boundary) {
        if (i == 0 && j == 0) return 0.0;
        if (j == 0) return log_inverse_gamma(rng, theta, i, j);
        if (i == 0) return log_inverse_gamma(rng, mu - theta, i, j);
    }
    return log_inverse_gamma(rng, mu, i, j);
}

inline WeightGrid sample_loggamma_grid(double mu, double theta, int m, int n, bool with_boundary, const RngSpec& rng) {
    if (!(mu > 0)) throw ParameterError("sample_loggamma_grid: mu must be positive");
    if (with_boundary && !(theta > 0 && theta < mu))
        throw ParameterError("sample_loggamma_grid: theta must lie in (0, mu)");
    WeightGrid g;
    g.region = Region::rectangle(m, n);
    g.distribution = with_boundary ? Distribution::log_gamma_stationary : Distribution::log_gamma;
    g.mu = mu;
    g.theta = theta;
    g.rng = rng;
    g.values.assign(g.region.size(), 0.0);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= m; ++i) g.at(i, j) = loggamma_weight(rng, mu, theta, with_boundary, i, j);
    return g;
}

/// Rebuild a grid from its metadata record.
inline WeightGrid regenerate(const nlohmann::json& meta) {
    const Distribution d = distribution_from_string(meta.at("distribution").get<std::string>());
    const Region region = Region::from_json(meta.at("region"));
    const RngSpec rng{meta.at("seed").get<std::uint64_t>(), meta.at("stream").get<std::uint64_t>()};
    if (d == Distribution::exponential)
        return sample_exponential_grid(SpeedFunction::from_json(meta.at("speed")), meta.at("scale").get<int>(),
                                       meta.at("shift").get<int>(), region, rng);
    if (region.kind != Region::Kind::rectangle) throw RegionError("log-gamma grids are rectangles");
    return sample_loggamma_grid(meta.at("mu").get<double>(), meta.at("theta").get<double>(), region.m, region.n,
                                d == Distribution::log_gamma_stationary, rng);
}

inline constexpr char grid_magic[8] = {'G', 'L', 'W', 'G', 'R', 'I', 'D', '1'};

/// Writes <stem>.bin (magic, count, little-endian doubles) and <stem>.json (metadata).
inline void write_grid(const WeightGrid& g, const std::string& stem) {
    static_assert(std::endian::native == std::endian::little, "binary sidecar assumes little-endian hosts");
    std::ofstream bin(stem + ".bin", std::ios::binary);
    if (!bin) throw Error("write_grid: cannot open " + stem + ".bin");
    const std::uint64_t count = g.values.size();
    bin.write(grid_magic, sizeof grid_magic);
    bin.write(reinterpret_cast<const char*>(&count), sizeof count);
    bin.write(reinterpret_cast<const char*>(g.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    std::ofstream meta(stem + ".json");
    if (!meta) throw Error("write_grid: cannot open " + stem + ".json");
    meta << g.metadata().dump(2) << '\n';
}

inline WeightGrid read_grid(const std::string& stem) {
    std::ifstream meta(stem + ".json");
    if (!meta) throw Error("read_grid: cannot open " + stem + ".json");
    const nlohmann::json j = nlohmann::json::parse(meta);
    WeightGrid g;
    g.distribution = distribution_from_string(j.at("distribution").get<std::string>());
    g.region = Region::from_json(j.at("region"));
    g.speed = SpeedFunction::from_json(j.at("speed"));
    g.shift = j.at("shift").get<int>();
    g.scale = j.at("scale").get<int>();
    g.mu = j.at("mu").get<double>();
    g.theta = j.at("theta").get<double>();
    g.rng = {j.at("seed").get<std::uint64_t>(), j.at("stream").get<std::uint64_t>()};
    std::ifstream bin(stem + ".bin", std::ios::binary);
    if (!bin) throw Error("read_grid: cannot open " + stem + ".bin");
    char magic[8];
    std::uint64_t count = 0;
    bin.read(magic, sizeof magic);
    bin.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!bin || std::memcmp(magic, grid_magic, sizeof magic) != 0 || count != g.region.size())
        throw Error("read_grid: malformed sidecar " + stem + ".bin");
    g.values.resize(count);
    bin.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!bin) throw Error("read_grid: truncated sidecar " + stem + ".bin");
    return g;
}

} // namespace growthlab::env
