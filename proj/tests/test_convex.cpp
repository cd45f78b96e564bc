#include <growthlab/convex.hpp>
#include <growthlab/specfun.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace growthlab;
using namespace growthlab::convex;

namespace {

GridFunction quadratic(double lo, double hi, int points = 2001) {
    return GridFunction::sample([](double x) { return 0.5 * x * x; }, lo, hi, points);
}

} // namespace

TEST(GridFunction, ValidateRejectsBadInput) {
    GridFunction g{{0.0, 1.0}, {0.0}};
    EXPECT_THROW(g.validate(), ParameterError);
    GridFunction h{{0.0, 0.0}, {0.0, 1.0}};
    EXPECT_THROW(h.validate(), ParameterError);
    GridFunction mid{{0.0, 1.0, 2.0}, {0.0, inf, 0.0}};
    EXPECT_THROW(mid.validate(), ParameterError);
    GridFunction edges{{0.0, 1.0, 2.0}, {inf, 0.0, inf}};
    EXPECT_NO_THROW(edges.validate());
}

TEST(Legendre, QuadraticIsSelfDual) {
    const auto f = quadratic(-5, 5);
    const auto slopes = linspace(-3, 3, 121);
    const auto fs = legendre(f, slopes);
    for (std::size_t k = 0; k < slopes.size(); ++k) EXPECT_NEAR(fs.ys[k], 0.5 * slopes[k] * slopes[k], 1e-3);
}

TEST(Legendre, AbsoluteValue) {
    const auto f = GridFunction::sample([](double x) { return std::abs(x); }, -10, 10, 2001);
    const auto slopes = linspace(-2, 2, 81);
    const auto fs = legendre(f, slopes);
    for (std::size_t k = 0; k < slopes.size(); ++k) {
        if (std::abs(slopes[k]) <= 1.0 + 1e-12)
            EXPECT_NEAR(fs.ys[k], 0.0, 1e-12);
        else
            EXPECT_EQ(fs.ys[k], inf) << slopes[k];
    }
}

TEST(Legendre, FluxDualNegatedConvention) {
    // g(y) = sup_rho {rho(1-rho) - y rho} is the Legendre transform of -f at slope -y
    const auto neg_flux = GridFunction::sample([](double r) { return -r * (1 - r); }, 0, 1, 2001, 0, 1);
    const std::vector<double> slopes = {0.0, -0.5, 0.5, -1.0, 1.0, -2.0, 2.0};
    const auto g = legendre(neg_flux, slopes);
    EXPECT_NEAR(g.ys[0], 0.25, 1e-9);
    for (std::size_t k = 0; k < slopes.size(); ++k) {
        const double y = -slopes[k];
        const double expect = y <= -1 ? -y : (y >= 1 ? 0.0 : 0.25 * (1 - y) * (1 - y));
        EXPECT_NEAR(g.ys[k], expect, 1e-6) << y;
    }
}

TEST(Legendre, DoubleDualityRecoversConvexHull) {
    // non-convex input: hull of min((x-1)^2, (x+1)^2) is flat on [-1,1]
    const auto f = GridFunction::sample([](double x) { return std::min((x - 1) * (x - 1), (x + 1) * (x + 1)); }, -4, 4, 1601);
    const auto slopes = linspace(-6, 6, 2401);
    const auto fss = legendre(legendre(f, slopes), linspace(-2, 2, 81));
    const double h = 8.0 / 1600;
    for (std::size_t k = 0; k < fss.xs.size(); ++k) {
        const double x = fss.xs[k];
        const double hull = std::abs(x) <= 1 ? 0.0 : (std::abs(x) - 1) * (std::abs(x) - 1);
        EXPECT_NEAR(fss.ys[k], hull, 2 * h + 1e-4) << x;
    }
}

TEST(Legendre, ResultIsConvex) {
    const auto f = GridFunction::sample([](double x) { return std::cosh(x); }, -3, 3, 1001);
    const auto fs = legendre(f, linspace(-5, 5, 201));
    for (std::size_t k = 1; k + 1 < fs.ys.size(); ++k)
        EXPECT_GE(fs.ys[k + 1] - 2 * fs.ys[k] + fs.ys[k - 1], -1e-10);
}

TEST(Legendre, EmptyDomain) {
    GridFunction f{{0.0, 1.0}, {inf, inf}};
    const std::vector<double> s = {0.0};
    EXPECT_THROW(legendre(f, s), EmptyDomainError);
}

TEST(InfConvolve, QuadraticHalves) {
    const auto f = quadratic(-6, 6, 1201);
    const auto xs = linspace(-3, 3, 61);
    const auto fg = inf_convolve(f, f, xs);
    for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_NEAR(fg.ys[k], 0.25 * xs[k] * xs[k], 1e-3);
}

TEST(InfConvolve, IndicatorOfZeroIsIdentity) {
    const auto f = GridFunction::sample([](double x) { return std::exp(0.3 * x) + x * x; }, -2, 2, 401);
    GridFunction delta{{-1.0, 0.0, 1.0}, {inf, 0.0, inf}};
    const auto xs = linspace(-2, 2, 41);
    const auto out = inf_convolve(f, delta, xs);
    for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_NEAR(out.ys[k], f(xs[k]), 1e-12);
}

TEST(InfConvolve, LegendreOfConvolutionIsSumOfLegendres) {
    const auto f = quadratic(-8, 8, 1601);
    const auto g = GridFunction::sample([](double x) { return std::abs(x) + 0.25 * x * x; }, -8, 8, 1601);
    const auto xs = linspace(-8, 8, 1601);
    const auto fg = inf_convolve(f, g, xs);
    const auto slopes = linspace(-2, 2, 41);
    const auto lhs = legendre(fg, slopes);
    const auto fs = legendre(f, slopes), gs = legendre(g, slopes);
    for (std::size_t k = 0; k < slopes.size(); ++k) EXPECT_NEAR(lhs.ys[k], fs.ys[k] + gs.ys[k], 2e-3) << slopes[k];
}

TEST(InfConvolve, EmptyDomain) {
    GridFunction f{{0.0, 1.0}, {inf, inf}};
    const auto g = quadratic(-1, 1, 11);
    const std::vector<double> xs = {0.0};
    EXPECT_THROW(inf_convolve(f, g, xs), EmptyDomainError);
}

TEST(CramerOneSided, Gaussian) {
    LogMgf M{[](double u) { return 0.5 * u * u; }};
    EXPECT_NEAR(cramer_one_sided(M, 0.0, Tail::upper), 0.0, 1e-12);
    EXPECT_NEAR(cramer_one_sided(M, 1.0, Tail::upper), 0.5, 1e-10);
    EXPECT_NEAR(cramer_one_sided(M, -1.0, Tail::upper), 0.0, 1e-12);
    EXPECT_NEAR(cramer_one_sided(M, -1.0, Tail::lower), 0.5, 1e-10);
    EXPECT_NEAR(cramer_one_sided(M, 3.0, Tail::upper), 4.5, 1e-9);
}

TEST(CramerOneSided, LogInverseGammaAtMean) {
    LogMgf M{[](double u) { return specfun::log_gamma(2 - u) - specfun::log_gamma(2); }, 2.0};
    const double mean = -specfun::digamma(2.0);
    EXPECT_NEAR(cramer_one_sided(M, mean, Tail::upper), 0.0, 1e-10);
    // grid-search oracle above the mean
    const double a = mean + 1.0;
    double best = 0;
    for (int k = 0; k <= 200000; ++k) {
        const double u = 2.0 * k / 200001;
        best = std::max(best, a * u - M.eval(u));
    }
    EXPECT_NEAR(cramer_one_sided(M, a, Tail::upper), best, 1e-6);
}

TEST(CramerOneSided, UpperRateMonotone) {
    LogMgf M{[](double u) { return specfun::log_gamma(2 - u) - specfun::log_gamma(2); }, 2.0};
    const double mean = -specfun::digamma(2.0);
    double prev = -1;
    for (double a = mean - 1; a <= mean + 3; a += 0.05) {
        const double v = cramer_one_sided(M, a, Tail::upper);
        EXPECT_GE(v, prev - 1e-12);
        if (a <= mean) EXPECT_NEAR(v, 0.0, 1e-12);
        prev = v;
    }
}

TEST(CramerOneSided, InnerObjectiveConcave) {
    auto M = [](double u) { return specfun::log_gamma(2 - u) - specfun::log_gamma(2); };
    const double a = 1.0, h = 1e-2;
    for (double u = h; u < 1.9; u += h) {
        const double d2 = (a * (u + h) - M(u + h)) - 2 * (a * u - M(u)) + (a * (u - h) - M(u - h));
        EXPECT_LE(d2, 1e-8);
    }
}

TEST(CramerOneSided, Divergence) {
    LogMgf M{[](double u) { return u; }};
    EXPECT_THROW(cramer_one_sided(M, 2.0, Tail::upper), DivergenceError);
}

TEST(SumRate, RestrictedInterval) {
    auto lambda = [](double x) { return x * x; };
    auto phi = [](double x) { return x * x; };
    EXPECT_NEAR(sum_rate(lambda, phi, 2.0, -10, -10, 4001), 2.0, 1e-5);
    EXPECT_NEAR(sum_rate(lambda, phi, 2.0, 1.5, 0.0, 2001), 1.5 * 1.5 + 0.25, 1e-9);
    EXPECT_EQ(sum_rate(lambda, phi, 1.0, 1.0, 1.0), inf);
}
