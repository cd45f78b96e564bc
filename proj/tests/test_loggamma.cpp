#include <growthlab/convex.hpp>
#include <growthlab/env.hpp>
#include <growthlab/lattice.hpp>
#include <growthlab/loggamma.hpp>
#include <growthlab/mc.hpp>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace growthlab;
using namespace growthlab::loggamma;
using specfun::digamma;
using specfun::euler_gamma;
using specfun::log_gamma;

namespace {

constexpr double two_gamma = 2 * euler_gamma;

double inverse_gamma_cdf(double shape, double x) { return x <= 0 ? 0.0 : boost::math::gamma_q(shape, 1.0 / x); }

} // namespace

TEST(StationaryCell, EqualInputs) {
    const double y = 0.37;
    const auto c = StationaryCell::propagate(y, y, y);
    EXPECT_DOUBLE_EQ(c.U_out, 2 * y);
    EXPECT_DOUBLE_EQ(c.V_out, 2 * y);
    // X is built from the incoming pair, so (1/y + 1/y)^-1
    EXPECT_DOUBLE_EQ(c.X, 0.5 * y);
    EXPECT_THROW(StationaryCell::propagate(-1, 1, 1), DomainError);
}

TEST(Burke, RatioIdentitiesAgainstPartitionField) {
    const int m = 5, n = 5;
    env::CounterRng g(env::RngSpec{3, 1});
    std::vector<double> U(m), V(n), Y(m * n);
    for (double& v : U) v = 0.2 + 3 * env::uniform01(g);
    for (double& v : V) v = 0.2 + 3 * env::uniform01(g);
    for (double& v : Y) v = 0.2 + 3 * env::uniform01(g);
    const auto f = burke_propagate(U, V, Y);
    env::WeightGrid w;
    w.region = env::Region::rectangle(m, n);
    w.values.assign(w.region.size(), 0.0);
    for (int i = 1; i <= m; ++i) w.at(i, 0) = std::log(U[i - 1]);
    for (int j = 1; j <= n; ++j) w.at(0, j) = std::log(V[j - 1]);
    for (int j = 1; j <= n; ++j)
        for (int i = 1; i <= m; ++i) w.at(i, j) = std::log(Y[(j - 1) * m + (i - 1)]);
    const auto z = lattice::log_partition(w, 1.0, true);
    for (int j = 1; j <= n; ++j)
        for (int i = 1; i <= m; ++i) {
            const double u = std::exp(z.at(i, j) - z.at(i - 1, j));
            const double v = std::exp(z.at(i, j) - z.at(i, j - 1));
            EXPECT_NEAR(f.u(i, j) / u, 1.0, 1e-10);
            EXPECT_NEAR(f.v(i, j) / v, 1.0, 1e-10);
            EXPECT_NEAR(f.x(i - 1, j - 1), 1.0 / (1.0 / f.u(i, j - 1) + 1.0 / f.v(i - 1, j)), 1e-14);
        }
    EXPECT_THROW(burke_propagate({1.0}, {1.0}, {0.0}), DomainError);
    EXPECT_THROW(burke_propagate({1.0}, {1.0}, {}), ParameterError);
}

TEST(Burke, StationaryMarginals) {
    // top row U, right column V and interior X of independent 20 x 20 blocks
    const double mu = 2.0, theta = 0.8;
    const int m = 20, n = 20;
    std::vector<double> us, vs, xs;
    for (std::uint64_t rep = 0; rep < 500; ++rep) {
        const auto grid = env::sample_loggamma_grid(mu, theta, m, n, true, {55, rep});
        std::vector<double> U(m), V(n), Y(m * n);
        for (int i = 1; i <= m; ++i) U[i - 1] = std::exp(grid.at(i, 0));
        for (int j = 1; j <= n; ++j) V[j - 1] = std::exp(grid.at(0, j));
        for (int j = 1; j <= n; ++j)
            for (int i = 1; i <= m; ++i) Y[(j - 1) * m + (i - 1)] = std::exp(grid.at(i, j));
        const auto f = burke_propagate(U, V, Y);
        for (int i = 1; i <= m; ++i) us.push_back(f.u(i, n));
        for (int j = 1; j <= n; ++j) vs.push_back(f.v(m, j));
        xs.push_back(f.x(m / 2, n / 2));
    }
    EXPECT_GT(mc::ks_test(us, [&](double x) { return inverse_gamma_cdf(theta, x); }).p_value, 0.01);
    EXPECT_GT(mc::ks_test(vs, [&](double x) { return inverse_gamma_cdf(mu - theta, x); }).p_value, 0.01);
    EXPECT_GT(mc::ks_test(xs, [&](double x) { return inverse_gamma_cdf(mu, x); }).p_value, 0.01);
}

TEST(StationaryMean, ExactValues) {
    const LogGammaParams p{2.0, 0.8};
    EXPECT_EQ(stationary_mean_logZ(0, 0, p), 0.0);
    EXPECT_NEAR(stationary_mean_logZ(1, 0, p), -digamma(0.8), 1e-15);
    EXPECT_NEAR(stationary_mean_logZ(200, 200, p), 250.80969265966534, 1e-10);
    EXPECT_THROW(stationary_mean_logZ(1, 1, LogGammaParams{2.0, 2.5}), ParameterError);
}

TEST(StationaryMean, MonteCarlo) {
    const LogGammaParams p{2.0, 0.8};
    const int m = 50, n = 50;
    const auto est = mc::run_replicas(
        [&](const env::RngSpec& rng) {
            return lattice::log_partition_value(
                m, n, [&](int i, int j) { return env::loggamma_weight(rng, p.mu, p.theta, true, i, j); }, 1.0, true);
        },
        400, 91);
    EXPECT_NEAR(est.mean, stationary_mean_logZ(m, n, p), 3 * est.std_error);
}

TEST(FreeEnergy, DiagonalValue) {
    EXPECT_NEAR(free_energy(1, 1, 2), two_gamma, 1e-12);
    EXPECT_NEAR(theta_st(1, 1, 2), 1.0, 1e-12);
    EXPECT_NEAR(free_energy(1, 1, 2), 1.154431329803065, 1e-12);
}

TEST(FreeEnergy, Homogeneity) {
    for (auto [s, t] : {std::pair{1.0, 1.0}, {0.3, 2.0}, {4.0, 0.5}}) {
        EXPECT_NEAR(free_energy(2 * s, 2 * t, 2), 2 * free_energy(s, t, 2), 1e-10);
        EXPECT_NEAR(free_energy(0.5 * s, 0.5 * t, 3), 0.5 * free_energy(s, t, 3), 1e-10);
    }
}

TEST(FreeEnergy, StationaryPointIsGridMinimum) {
    const double s = 1, t = 4, mu = 2;
    const double th = theta_st(s, t, mu);
    EXPECT_NEAR(t * specfun::trigamma(mu - th), s * specfun::trigamma(th), 1e-10);
    double best = convex::inf;
    for (int k = 1; k < 200000; ++k) {
        const double x = mu * k / 200000.0;
        best = std::min(best, -(s * digamma(x) + t * digamma(mu - x)));
    }
    EXPECT_NEAR(free_energy(s, t, mu), best, 1e-8);
    EXPECT_NEAR(free_energy(2, 1, 2), 1.53939142906187, 1e-10);
}

TEST(FreeEnergy, BoundaryAndConcavity) {
    EXPECT_NEAR(free_energy(3, 0, 2), -3 * digamma(2), 1e-14);
    // the boundary is approached like 2 sqrt(s t Psi1(mu)) + O(s)
    for (double s : {1e-9, 1e-7})
        EXPECT_NEAR(free_energy(s, 1, 2) - free_energy(0, 1, 2), 2 * std::sqrt(s * specfun::trigamma(2)), 2 * s) << s;
    const double a = free_energy(0.2, 1.8, 2), b = free_energy(1.8, 0.2, 2);
    EXPECT_GE(free_energy(1, 1, 2), 0.5 * (a + b));
    EXPECT_THROW(free_energy(0, 0, 2), ParameterError);
}

TEST(CramerRate, ZeroAtMeanAndConvex) {
    for (double mu : {0.7, 2.0, 5.0}) EXPECT_NEAR(cramer_rate(-digamma(mu), mu), 0.0, 1e-10);
    std::vector<double> v;
    const double h = 0.05;
    for (double r = -3; r <= 3; r += h) v.push_back(cramer_rate(r, 2.0));
    for (std::size_t k = 1; k + 1 < v.size(); ++k) EXPECT_GE(v[k + 1] - 2 * v[k] + v[k - 1], -1e-8);
}

TEST(CramerRate, MatchesOneSidedCramer) {
    convex::LogMgf M{[](double u) { return log_gamma(2 - u) - log_gamma(2); }, 2.0};
    EXPECT_NEAR(cramer_rate(0.0, 2.0), convex::cramer_one_sided(M, 0.0, convex::Tail::upper), 1e-6);
    EXPECT_NEAR(cramer_rate(1.3, 2.0), convex::cramer_one_sided(M, 1.3, convex::Tail::upper), 1e-6);
}

TEST(BoundaryRate, Branches) {
    EXPECT_NEAR(boundary_rate(1, -digamma(2), 2), 0.0, 1e-10);
    EXPECT_DOUBLE_EQ(boundary_rate(0, 1, 2), 2.0);
    EXPECT_EQ(boundary_rate(0, -1, 2), 0.0);
    EXPECT_EQ(boundary_rate(1, -5, 2), 0.0);
    EXPECT_NEAR(boundary_rate(1e-4, 0.5, 2), 1.0, 5e-3);
    EXPECT_THROW(boundary_rate(-1, 0, 2), ParameterError);
}

TEST(PointRate, ZeroSet) {
    const PointRate J(1, 1, 2);
    EXPECT_NEAR(J(two_gamma), 0.0, 1e-12);
    for (double r : {two_gamma - 2.0, two_gamma - 0.1, two_gamma - 1e-6}) EXPECT_EQ(J(r), 0.0);
    for (double r : {two_gamma + 1e-3, two_gamma + 0.1, two_gamma + 1.0}) EXPECT_GT(J(r), 0.0);
}

TEST(PointRate, RefinedGridOracle) {
    const double r = two_gamma + 0.5;
    const double v = point_rate(1, 1, r, 2);
    EXPECT_GT(v, 0.0);
    EXPECT_NEAR(v, PointRate(1, 1, 2, 5120)(r), 1e-8);
    EXPECT_NEAR(v, 0.288875921812, 1e-9);
}

TEST(PointRate, Symmetry) {
    const PointRate a(1, 2, 2), b(2, 1, 2);
    for (int k = 0; k < 50; ++k) {
        const double r = 1.0 + 3.0 * k / 49;
        EXPECT_NEAR(a(r), b(r), 1e-6) << r;
    }
    EXPECT_NEAR(a(2.0), 0.206160863628, 1e-9);
}

TEST(PointRate, ConvexNondecreasing) {
    for (auto [s, t] : {std::pair{1.0, 1.0}, {0.5, 2.0}}) {
        const PointRate J(s, t, 2);
        std::vector<double> v;
        for (double r = 0; r <= 5; r += 0.05) v.push_back(J(r));
        for (std::size_t k = 1; k < v.size(); ++k) EXPECT_GE(v[k], v[k - 1] - 1e-12);
        for (std::size_t k = 1; k + 1 < v.size(); ++k) EXPECT_GE(v[k + 1] - 2 * v[k] + v[k - 1], -1e-8);
    }
}

TEST(PointRate, BoundaryDelegation) {
    EXPECT_DOUBLE_EQ(point_rate(0, 1.5, 1.0, 2), boundary_rate(1.5, 1.0, 2));
    EXPECT_THROW(point_rate(0, 0, 1.0, 2), ParameterError);
}

TEST(FreeEndpointRate, DelegatesAndIsMinimalOverSplits) {
    EXPECT_NEAR(free_endpoint_rate(2, two_gamma, 2), 0.0, 1e-12);
    for (double r : {1.0, 1.5, 2.5, 4.0}) {
        const double f = free_endpoint_rate(2, r, 2);
        EXPECT_DOUBLE_EQ(f, point_rate(1, 1, r, 2));
        for (int k = 1; k <= 9; ++k) {
            const double a = 0.2 * k;
            EXPECT_LE(f, point_rate(a, 2 - a, r, 2) + 1e-6) << r << ' ' << a;
        }
    }
    double prev = 0;
    for (double r = 0; r <= 5; r += 0.1) {
        const double v = free_endpoint_rate(2, r, 2);
        EXPECT_GE(v, prev - 1e-12);
        prev = v;
    }
}

TEST(DualRate, Basics) {
    EXPECT_EQ(dual_rate(1, 1, 0.0, 2), 0.0);
    EXPECT_EQ(dual_rate(1, 1, 2.0, 2), convex::inf);
    EXPECT_THROW(dual_rate(1, 1, -0.1, 2), DomainError);
    const double xi = 1e-4;
    EXPECT_NEAR(dual_rate(1, 1, xi, 2) / xi, free_energy(1, 1, 2), 1e-3);
    EXPECT_NEAR(dual_rate(1, 1, 0.2, 2), 0.232497361989, 1e-8);
}

TEST(DualRate, MatchesClosedDual) {
    const PointRate J(1, 2, 2);
    for (double xi : {0.1, 0.5, 1.0, 1.5}) EXPECT_NEAR(dual_rate(J, xi), J.K(xi), 1e-6) << xi;
}

TEST(DualRate, LegendreRoundtrip) {
    const PointRate J(1, 1, 2);
    const auto xis = convex::linspace(0.0, 2.0 * (1 - 1e-6), 300);
    convex::GridFunction dual;
    dual.xs = xis;
    for (double xi : xis) dual.ys.push_back(dual_rate(J, xi));
    const double p = J.free_energy_value();
    std::vector<double> rs = {p + 0.05, p + 0.2, p + 0.5, p + 1.0, p + 2.0};
    const auto back = convex::legendre(dual, rs);
    for (std::size_t k = 0; k < rs.size(); ++k) EXPECT_NEAR(back.ys[k], J(rs[k]), 5e-3) << rs[k];
}

TEST(KappaStar, Branches) {
    EXPECT_EQ(kappa_star(-1, 1, 1, 0.0, 2, 0.8), 0.0);
    EXPECT_NEAR(kappa_star(0, 1, 1, 0.3, 2, 0.8), log_gamma(1.5) - log_gamma(1.2), 1e-14);
    EXPECT_NEAR(kappa_star(0, 1, 1, 0.3, 2, 0.8), -0.0354081476319294, 1e-13);
    EXPECT_EQ(kappa_star(0.5, 1, 1, 0.9, 2, 0.8), convex::inf);
    EXPECT_EQ(kappa_star(-2, 1, 1, 0.1, 2, 0.8), convex::inf);
}

TEST(ExitDecomposition, Residuals) {
    EXPECT_EQ(exit_decomposition_residual(1, 1, 0.0, 1.3, 2), 0.0);
    EXPECT_LE(exit_decomposition_residual(1, 1, 0.2, 1.3, 2), 5e-3);
    EXPECT_LE(exit_decomposition_residual(2, 1, 0.5, 2, 3), 5e-3);
    EXPECT_THROW(exit_decomposition_residual(1, 1, 0.5, 0.4, 2), ParameterError);
}

TEST(CubeRoot, ExponentNearThreeHalves) {
    const auto fit = cube_root_expansion_exponent(2.0);
    EXPECT_GE(fit.slope, 1.35);
    EXPECT_LE(fit.slope, 1.65);
    EXPECT_NEAR(fit.r0, two_gamma, 1e-12);
    const PointRate J(1, 1, 2);
    EXPECT_NEAR(J(fit.r0), 0.0, 1e-8);
    EXPECT_EQ(J(fit.r0 - 0.1), 0.0);
}
