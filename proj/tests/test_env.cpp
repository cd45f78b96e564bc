#include <growthlab/env.hpp>
#include <growthlab/mc.hpp>
#include <growthlab/specfun.hpp>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <vector>

using namespace growthlab;
using namespace growthlab::env;

namespace {

struct Moments {
    double mean, var, se;
};

Moments moments(const std::vector<double>& xs) {
    double s = 0, s2 = 0;
    for (double x : xs) s += x;
    const double n = static_cast<double>(xs.size());
    const double m = s / n;
    for (double x : xs) s2 += (x - m) * (x - m);
    const double v = s2 / (n - 1);
    return {m, v, std::sqrt(v / n)};
}

} // namespace

TEST(SpeedFunction, TwoPhaseValues) {
    const auto c = SpeedFunction::two_phase(2, 1);
    EXPECT_EQ(speed_at(c, -0.5), 2.0);
    EXPECT_EQ(speed_at(c, 0.0), 1.0);
    EXPECT_EQ(speed_at(c, 0.5), 1.0);
    const auto k = SpeedFunction::constant(3);
    for (double x : {-1e9, -1.0, 0.0, 2.5}) EXPECT_EQ(speed_at(k, x), 3.0);
}

TEST(SpeedFunction, LowerSemicontinuousAtBreakpoints) {
    const SpeedFunction c({-1.0, 0.5, 2.0}, {0.7, 3.0, 1.5, 4.0});
    EXPECT_EQ(c(-1.0), 0.7);
    EXPECT_EQ(c(0.5), 1.5);
    EXPECT_EQ(c(2.0), 1.5);
    EXPECT_EQ(c(-1.0 - 1e-12), 0.7);
    EXPECT_EQ(c(-1.0 + 1e-12), 3.0);
    EXPECT_EQ(c(2.0 + 1e-12), 4.0);
    EXPECT_EQ(c.max_rate(), 4.0);
    EXPECT_EQ(c.min_rate(), 0.7);
}

TEST(SpeedFunction, ShiftReflectJson) {
    const SpeedFunction c({0.0, 1.0}, {2.0, 1.0, 0.5});
    EXPECT_EQ(c.shifted(0.25)(0.2), c(0.2 - 0.25));
    EXPECT_EQ(c.shifted(0.25)(1.25), c(1.0));
    for (double x : {-0.5, 0.0, 0.5, 1.0, 1.5}) EXPECT_EQ(c.reflected()(-x), c(x));
    const auto back = SpeedFunction::from_json(c.to_json());
    EXPECT_EQ(back.breakpoints(), c.breakpoints());
    EXPECT_EQ(back.rates(), c.rates());
}

TEST(SpeedFunction, InvalidInput) {
    EXPECT_THROW(SpeedFunction({0.0}, {1.0}), ParameterError);
    EXPECT_THROW(SpeedFunction({}, {-1.0}), ParameterError);
    EXPECT_THROW(SpeedFunction({1.0, 0.0}, {1.0, 1.0, 1.0}), ParameterError);
}

TEST(CounterRng, UniformInOpenInterval) {
    CounterRng g(RngSpec{7, 3}, 1, 2);
    for (int k = 0; k < 100000; ++k) {
        const double u = uniform01(g);
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(CounterRng, DistinctStreams) {
    CounterRng a(RngSpec{1, 0}, 0, 0), b(RngSpec{1, 1}, 0, 0), c(RngSpec{2, 0}, 0, 0);
    EXPECT_NE(a(), b());
    EXPECT_NE(CounterRng(RngSpec{1, 0}, 0, 0)(), c());
    EXPECT_NE(site_key({1, 0}, 1, 2), site_key({1, 0}, 2, 1));
}

TEST(ExponentialGrid, UnitRateMean) {
    std::vector<double> xs;
    for (std::uint64_t k = 0; k < 100000; ++k) xs.push_back(exponential_weight({11, k}, 1.0, 3, 4));
    const auto m = moments(xs);
    EXPECT_NEAR(m.mean, 1.0, 3 * m.se);
}

TEST(ExponentialGrid, RateTwoMean) {
    const auto c = SpeedFunction::constant(2);
    std::vector<double> xs;
    for (std::uint64_t k = 0; k < 100000; ++k)
        xs.push_back(sample_exponential_grid(c, 1, 0, Region::rectangle(0, 0), {12, k}).at(0, 0));
    const auto m = moments(xs);
    EXPECT_NEAR(m.mean, 0.5, 3 * m.se);
}

TEST(ExponentialGrid, SiteRatesFollowSpeed) {
    const auto c = SpeedFunction::two_phase(4, 1);
    const int n = 10;
    const auto g = sample_exponential_grid(c, n, 2, Region::wedge(3, 5), {5, 0});
    for (int j = 1; j <= 3; ++j)
        for (int i = -j + 1; i <= 5; ++i) {
            const double rate = c(static_cast<double>(i - 2) / n);
            CounterRng r({5, 0}, i, j);
            EXPECT_EQ(g.at(i, j), exponential(r, rate));
        }
    const auto rect = sample_exponential_grid(c, n, 0, Region::rectangle(3, 3), {5, 0});
    EXPECT_EQ(rect.at(3, 1), exponential_weight({5, 0}, 1.0, 3, 1));
    EXPECT_EQ(rect.at(1, 3), exponential_weight({5, 0}, 4.0, 1, 3));
}

TEST(ExponentialGrid, Deterministic) {
    const auto c = SpeedFunction::two_phase(2, 1);
    const auto a = sample_exponential_grid(c, 8, 1, Region::rectangle(6, 5), {99, 4});
    const auto b = sample_exponential_grid(c, 8, 1, Region::rectangle(6, 5), {99, 4});
    EXPECT_EQ(a.values, b.values);
    for (double v : a.values) EXPECT_GE(v, 0.0);
    EXPECT_THROW(sample_exponential_grid(c, 0, 0, Region::rectangle(1, 1), {}), ParameterError);
}

TEST(LogGammaGrid, BulkMoments) {
    std::vector<double> xs;
    for (std::uint64_t k = 0; k < 100000; ++k) xs.push_back(loggamma_weight({21, k}, 2.0, 1.0, false, 1, 1));
    const auto m = moments(xs);
    EXPECT_NEAR(m.mean, -specfun::digamma(2.0), 3 * m.se);
    // std error of the sample variance from the fourth central moment
    double m4 = 0;
    for (double x : xs) m4 += std::pow(x - m.mean, 4);
    m4 /= static_cast<double>(xs.size());
    const double var_se = std::sqrt((m4 - m.var * m.var) / static_cast<double>(xs.size()));
    EXPECT_NEAR(m.var, specfun::trigamma(2.0), 3 * var_se);
}

TEST(LogGammaGrid, BoundaryConvention) {
    const auto g = sample_loggamma_grid(2.0, 0.8, 4, 3, true, {3, 0});
    EXPECT_EQ(g.at(0, 0), 0.0);
    EXPECT_EQ(g.at(2, 0), log_inverse_gamma({3, 0}, 0.8, 2, 0));
    EXPECT_EQ(g.at(0, 2), log_inverse_gamma({3, 0}, 1.2, 0, 2));
    EXPECT_EQ(g.at(2, 2), log_inverse_gamma({3, 0}, 2.0, 2, 2));
    EXPECT_THROW(sample_loggamma_grid(2.0, 2.0, 1, 1, true, {}), ParameterError);
    EXPECT_THROW(sample_loggamma_grid(2.0, 0.0, 1, 1, true, {}), ParameterError);
    EXPECT_NO_THROW(sample_loggamma_grid(2.0, 0.0, 1, 1, false, {}));
}

TEST(LogGammaGrid, SymmetricBoundaryMarginals) {
    std::vector<double> u, v;
    for (std::uint64_t k = 0; k < 4000; ++k) {
        u.push_back(loggamma_weight({31, k}, 2.0, 1.0, true, 1, 0));
        v.push_back(loggamma_weight({31, k}, 2.0, 1.0, true, 0, 1));
    }
    EXPECT_GT(mc::ks_two_sample(u, v).p_value, 0.01);
}

TEST(GammaSampler, KolmogorovSmirnov) {
    for (double shape : {0.4, 1.0, 2.7}) {
        std::vector<double> xs;
        CounterRng g(RngSpec{41, static_cast<std::uint64_t>(shape * 10)});
        for (int k = 0; k < 10000; ++k) xs.push_back(gamma(g, shape));
        const auto r = mc::ks_test(xs, [shape](double x) { return x <= 0 ? 0.0 : boost::math::gamma_p(shape, x); });
        EXPECT_GT(r.p_value, 0.01) << shape;
    }
    CounterRng g(RngSpec{1, 1});
    EXPECT_THROW(gamma(g, 0.0), ParameterError);
}

TEST(WeightGrid, RegenerateIsBitIdentical) {
    const auto a = sample_exponential_grid(SpeedFunction::two_phase(3, 1), 5, -1, Region::wedge(4, 6), {77, 2});
    EXPECT_EQ(regenerate(a.metadata()).values, a.values);
    const auto b = sample_loggamma_grid(2.0, 0.7, 5, 4, true, {78, 1});
    EXPECT_EQ(regenerate(b.metadata()).values, b.values);
}

TEST(WeightGrid, SidecarRoundtrip) {
    const auto dir = std::filesystem::temp_directory_path() / "growthlab_env_test";
    std::filesystem::create_directories(dir);
    const std::string stem = (dir / "grid").string();
    const auto a = sample_exponential_grid(SpeedFunction::two_phase(2, 1), 4, 0, Region::rectangle(7, 3), {8, 8});
    write_grid(a, stem);
    const auto b = read_grid(stem);
    EXPECT_EQ(b.values, a.values);
    EXPECT_TRUE(b.region == a.region);
    EXPECT_EQ(b.rng.base_seed, 8u);
    std::filesystem::remove_all(dir);
}

TEST(Region, WedgeGeometry) {
    const auto r = Region::wedge(3, 2);
    EXPECT_TRUE(r.contains(0, 1));
    EXPECT_TRUE(r.contains(-2, 3));
    EXPECT_FALSE(r.contains(-1, 1));
    EXPECT_FALSE(r.contains(3, 1));
    EXPECT_FALSE(r.contains(0, 0));
    EXPECT_EQ(r.size(), 3u + 4u + 5u);
    EXPECT_THROW(Region::wedge(std::vector<int>{-1}), RegionError);
    EXPECT_THROW(Region::rectangle(-1, 2), RegionError);
}
