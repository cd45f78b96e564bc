#include <growthlab/specfun.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace growthlab;
using namespace growthlab::specfun;

namespace {

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> xs(points);
    for (int k = 0; k < points; ++k) xs[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
    return xs;
}

} // namespace

TEST(LogGamma, IntegerPoints) {
    EXPECT_EQ(log_gamma(1.0), 0.0);
    EXPECT_EQ(log_gamma(2.0), 0.0);
    EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-13);
}

TEST(LogGamma, ReferenceValues) {
    EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-13);
    const std::vector<std::pair<double, double>> ref = {
        {0.5, 0.57236494292470009},  {1.5, -0.12078223763524522}, {0.1, 2.2527126517342059},
        {3.7, 1.4280723266653881},   {25.0, 54.784729398112319},  {0.001, 6.9071788853838537},
    };
    for (auto [x, v] : ref) EXPECT_NEAR(log_gamma(x), v, 1e-12 * std::max(1.0, std::abs(v))) << x;
}

TEST(LogGamma, MatchesStdLgamma) {
    for (double x : log_grid(1e-3, 1e3, 61)) EXPECT_NEAR(log_gamma(x), std::lgamma(x), 1e-11 * std::max(1.0, std::abs(std::lgamma(x))));
}

TEST(LogGamma, DomainErrors) {
    EXPECT_THROW(log_gamma(0.0), DomainError);
    EXPECT_THROW(log_gamma(-1.5), DomainError);
    EXPECT_THROW(log_gamma(std::nan("")), DomainError);
    EXPECT_THROW(log_gamma(INFINITY), DomainError);
}

TEST(Digamma, ReferenceValues) {
    EXPECT_NEAR(digamma(1.0), -0.5772156649015329, 1e-12);
    EXPECT_NEAR(digamma(2.0), 0.4227843350984671, 1e-12);
    EXPECT_NEAR(digamma(0.5), -1.9635100260214235, 1e-12);
    EXPECT_NEAR(digamma(0.3), -3.5025242222001331, 1e-12);
    EXPECT_NEAR(digamma(0.8), -0.96500856670613836, 1e-12);
    EXPECT_NEAR(digamma(1.2), -0.28903989659218835, 1e-12);
    EXPECT_NEAR(digamma(2.5), 0.70315664064524319, 1e-12);
    EXPECT_NEAR(digamma(12.0), 2.442661679975812, 1e-12);
    EXPECT_THROW(digamma(0.0), DomainError);
}

TEST(Trigamma, ReferenceValues) {
    EXPECT_NEAR(trigamma(1.0), std::numbers::pi * std::numbers::pi / 6.0, 1e-12);
    EXPECT_NEAR(trigamma(0.5), std::numbers::pi * std::numbers::pi / 2.0, 1e-12);
    EXPECT_NEAR(trigamma(0.3), 12.245364546107731, 1e-11);
    EXPECT_NEAR(trigamma(0.8), 2.2994741375017, 1e-12);
    EXPECT_NEAR(trigamma(1.2), 1.2673772054237792, 1e-12);
    EXPECT_NEAR(trigamma(12.0), 0.086901872871768391, 1e-12);
    EXPECT_THROW(trigamma(-2.0), DomainError);
}

TEST(Trigamma, PositiveEverywhere) {
    for (double x : log_grid(1e-3, 1e3, 200)) EXPECT_GT(trigamma(x), 0.0);
}

TEST(Digamma, Recurrence) {
    for (double x : {0.1, 0.5, 1.0, 2.0, 10.0}) EXPECT_NEAR(digamma(x + 1) - digamma(x), 1.0 / x, 1e-10) << x;
}

TEST(Digamma, FiniteDifferenceConsistency) {
    const double h = 1e-5;
    for (double x : {0.3, 0.7, 1.0, 2.5, 8.0, 9.99, 10.01, 40.0}) {
        EXPECT_NEAR((log_gamma(x + h) - log_gamma(x - h)) / (2 * h), digamma(x), 1e-6) << x;
        EXPECT_NEAR((digamma(x + h) - digamma(x - h)) / (2 * h), trigamma(x), 1e-6 * std::max(1.0, trigamma(x))) << x;
    }
}

TEST(Digamma, Monotonicity) {
    const auto xs = log_grid(1e-3, 1e3, 400);
    for (std::size_t k = 1; k < xs.size(); ++k) {
        EXPECT_GT(digamma(xs[k]), digamma(xs[k - 1]));
        EXPECT_LT(trigamma(xs[k]), trigamma(xs[k - 1]));
    }
}

TEST(InvDigamma, Roundtrips) {
    EXPECT_NEAR(inv_digamma(digamma(1.0)), 1.0, 1e-10);
    EXPECT_NEAR(inv_digamma(digamma(3.7)), 3.7, 1e-10);
    for (double x : log_grid(1e-2, 50, 80)) EXPECT_NEAR(inv_digamma(digamma(x)), x, 1e-9 * std::max(1.0, x)) << x;
}

TEST(InvDigamma, LargeNegativeArgument) {
    const double x = inv_digamma(-10.0);
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
    EXPECT_LE(std::abs(digamma(x) + 10.0), 1e-10);
    EXPECT_NEAR(x, 0.104357, 1e-6);
}

TEST(InvDigamma, IterationLimit) {
    EXPECT_THROW(inv_digamma(0.3, PrecisionPolicy{1e-300, 1e-300, 1}), IterationLimitError);
    EXPECT_THROW(inv_digamma(std::nan("")), DomainError);
}

TEST(SolveMonotoneRoot, Linear) {
    EXPECT_NEAR(solve_monotone_root([](double x) { return x - 2.0; }, {0.0, 5.0}), 2.0, 1e-12);
}

TEST(SolveMonotoneRoot, SymmetricTrigammaRoot) {
    auto f = [](double th) { return trigamma(2 - th) - trigamma(th); };
    EXPECT_NEAR(solve_monotone_root(f, {0.01, 1.99}), 1.0, 1e-10);
}

TEST(SolveMonotoneRoot, AsymmetricTrigammaRoot) {
    auto f = [](double th) { return 4 * trigamma(2 - th) - trigamma(th); };
    const double r = solve_monotone_root(f, {0.01, 1.99});
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, 1.0);
    EXPECT_LT(f(r - 1e-6), 0.0);
    EXPECT_GT(f(r + 1e-6), 0.0);
    EXPECT_NEAR(r, 0.5681735499831002, 1e-9);
}

TEST(SolveMonotoneRoot, Errors) {
    EXPECT_THROW(solve_monotone_root([](double x) { return x * x + 1; }, {-1.0, 1.0}), NoSignChangeError);
    EXPECT_THROW(solve_monotone_root([](double x) { return x; }, {1.0, -1.0}), ParameterError);
    EXPECT_THROW(solve_monotone_root([](double x) { return x * x * x - 0.3; }, {0.0, 1.0}, PrecisionPolicy{1e-300, 1e-300, 2}),
                 IterationLimitError);
    EXPECT_THROW(PrecisionPolicy({-1.0, 1e-12, 10}).validate(), ParameterError);
}
