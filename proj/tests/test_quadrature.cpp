#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bec/kernel.hpp"
#include "bec/quadrature.hpp"

using namespace bec;

TEST(Integrate, ConstantIsExact) {
    const CertifiedValue v = integrate([](double) { return 1.0; }, 0.0, 1.0, 1e-12);
    EXPECT_NEAR(v.estimate, 1.0, 1e-15);
    EXPECT_LE(v.error_bound, 1e-12);
    EXPECT_TRUE(v.converged);
}

TEST(Integrate, HalfLineGaussianViaSubstitution) {
    // u = x/(1−x) maps [0,1) onto [0,∞).
    auto f = [](double x) {
        if (x >= 1.0) return 0.0;
        const double u = x / (1.0 - x);
        return std::exp(-0.5 * u * u) / ((1.0 - x) * (1.0 - x));
    };
    const CertifiedValue v = integrate(f, 0.0, 1.0, 1e-11);
    const double exact = std::sqrt(std::numbers::pi / 2.0);
    EXPECT_NEAR(v.estimate, exact, v.error_bound + 1e-13);
    EXPECT_LE(v.error_bound, 1e-11);
}

TEST(Integrate, ClosedFormOracles) {
    struct Case {
        double (*f)(double);
        double a, b, exact;
    };
    const std::vector<Case> cases = {
        {[](double x) { return std::sqrt(x); }, 0.0, 1.0, 2.0 / 3.0},
        {[](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0, std::numbers::pi / 4.0},
        {[](double x) { return std::exp(-x) * std::pow(std::cos(3.0 * x), 2); }, 0.0, 5.0,
         // ∫ e^{−x}(1 + cos 6x)/2 = ½(1 − e^{−5}) + ½·(1 − e^{−5}(cos 30 − 6 sin 30))/37
         0.5 * (1.0 - std::exp(-5.0)) + 0.5 * (1.0 - std::exp(-5.0) * (std::cos(30.0) - 6.0 * std::sin(30.0))) / 37.0},
        {[](double x) { return std::abs(std::sin(7.0 * x)); }, 0.0, std::numbers::pi, 2.0},
    };
    for (const Case& c : cases) {
        const CertifiedValue v = integrate(c.f, c.a, c.b, 1e-10);
        EXPECT_NEAR(v.estimate, c.exact, v.error_bound + 1e-14);
        // certified direction for nonnegative integrands
        EXPECT_GE(v.upper(), c.exact - 1e-15);
    }
}

TEST(Integrate, FinerFixedGridOracle) {
    // Nonnegative integrand with a kink; composite Simpson on 10⁶ cells as the oracle.
    auto f = [](double x) { return std::abs(x - 0.3) * std::exp(std::sin(9.0 * x)); };
    const CertifiedValue v = integrate(f, 0.0, 1.0, 1e-9);
    const int cells = 1'000'000;
    auto simpson = [&](double a, double b, int m) {
        const double h = (b - a) / m;
        double s = f(a) + f(b);
        for (int i = 1; i < m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    const double oracle = simpson(0.0, 0.3, cells * 3 / 10) + simpson(0.3, 1.0, cells * 7 / 10);
    EXPECT_NEAR(v.estimate, oracle, v.error_bound + 1e-12);
    EXPECT_GE(v.upper(), oracle - 1e-12);
}

TEST(Integrate, PartitionIndependence) {
    auto f = [](double t) { return smoothing_weight(t) * std::exp(-0.5 * t * t); };
    const CertifiedValue a = integrate(f, 0.0, 1.0, 1e-11);
    const double pts[] = {0.0, 0.17, 0.5, 0.81, 1.0};
    const CertifiedValue b = integrate(f, std::span<const double>(pts), IntegrationOptions{1e-11, 4000});
    EXPECT_NEAR(a.estimate, b.estimate, 1e-8);
}

TEST(Integrate, Additivity) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> split(0.05, 2.95);
    auto f = [](double x) { return std::exp(-x) * (2.0 + std::cos(5.0 * x)); };
    for (int i = 0; i < 20; ++i) {
        const double b = split(rng);
        const CertifiedValue whole = integrate(f, 0.0, 3.0, 1e-10);
        const CertifiedValue left = integrate(f, 0.0, b, 1e-10);
        const CertifiedValue right = integrate(f, b, 3.0, 1e-10);
        EXPECT_LE(std::abs(whole.estimate - left.estimate - right.estimate),
                  whole.error_bound + left.error_bound + right.error_bound + 1e-15);
    }
}

TEST(Integrate, PanelLimitReportsNonConvergence) {
    auto f = [](double x) { return std::sin(1.0 / (x + 1e-4)); };
    const double pts[] = {0.0, 1.0};
    const CertifiedValue v = integrate(f, std::span<const double>(pts), IntegrationOptions{1e-14, 8});
    EXPECT_FALSE(v.converged);
    EXPECT_GT(v.error_bound, 1e-14);
}

TEST(Integrate, RejectsReversedLimits) { EXPECT_THROW(integrate([](double) { return 1.0; }, 1.0, 0.0, 1e-9), std::invalid_argument); }

TEST(ExponentialIntegral, MatchesStdExpint) {
    // E₁(x) = −Ei(−x).
    for (double x : {1e-8, 1e-4, 0.01, 0.1, 0.5, 0.99, 1.0, 1.01, 2.0, 5.0, 10.0, 30.0}) {
        const double oracle = -std::expint(-x);
        EXPECT_NEAR(exp_integral_e1(x) / oracle, 1.0, 1e-13) << "x=" << x;
    }
    // std::expint loses accuracy far out; use the asymptotic series e^{−x}/x Σ (−1)^k k!/x^k there.
    for (double x : {60.0, 100.0, 300.0}) {
        double sum = 0.0, term = 1.0;
        for (int k = 0; k < 25; ++k) {
            sum += term;
            term *= -(k + 1.0) / x;
        }
        EXPECT_NEAR(exp_integral_e1(x) / (std::exp(-x) / x * sum), 1.0, 1e-13) << "x=" << x;
    }
    EXPECT_THROW(exp_integral_e1(0.0), std::domain_error);
}

TEST(GaussianTail, KnownValueAndBounds) {
    EXPECT_NEAR(gaussian_tail_over_t(1.0).estimate, 0.5 * 0.5597735947761608, 1e-12);
    EXPECT_NEAR(gaussian_tail_over_t(1.0).estimate, 0.27988, 1e-5);
    for (double a : {3.0, 5.0, 8.0, 12.0}) {
        EXPECT_LE(gaussian_tail_over_t(a).upper(), std::exp(-0.5 * a * a) / (a * a));
    }
    double prev = gaussian_tail_over_t(0.05).estimate;
    for (double a = 0.1; a < 10.0; a += 0.1) {
        const double v = gaussian_tail_over_t(a).estimate;
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_THROW(gaussian_tail_over_t(0.0), std::domain_error);
}

TEST(GaussianTail, ConsistentWithQuadrature) {
    auto g = [](double u) { return std::exp(-0.5 * u * u) / u; };
    for (auto [a0, a] : std::vector<std::pair<double, double>>{{0.2, 1.0}, {0.5, 3.0}, {1.0, 6.0}}) {
        const CertifiedValue mid = integrate(g, a0, a, 1e-12);
        const CertifiedValue lhs = gaussian_tail_over_t(a);
        const CertifiedValue rhs = gaussian_tail_over_t(a0);
        EXPECT_NEAR(lhs.estimate + mid.estimate, rhs.estimate, lhs.error_bound + rhs.error_bound + mid.error_bound);
    }
}

TEST(NormalCdf, KnownValues) {
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
    EXPECT_NEAR(normal_cdf(-2.0), 0.022750131948179195, 1e-16);
}

TEST(FindRoot, BisectsToTolerance) {
    const double r = find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-13);
    EXPECT_NEAR(r, std::numbers::sqrt2, 1e-12);
    EXPECT_THROW(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-9), std::domain_error);
    EXPECT_THROW(find_root([](double) { return std::nan(""); }, -1.0, 1.0, 1e-9), std::domain_error);
}

TEST(MaximizeScalar, BhattacharyaObjective) {
    auto f = [](double x) { return normal_cdf(x) - x * x / (1.0 + x * x); };
    const ScalarOptimum m = maximize_scalar(f, 0.0, 10.0, 1e-12);
    EXPECT_NEAR(m.value, 0.54093654, 1e-8);
    EXPECT_GE(m.value, f(0.0));
}

TEST(MaximizeScalar, ConstantAndGridOracle) {
    const ScalarOptimum c = maximize_scalar([](double) { return 3.0; }, -1.0, 1.0, 1e-10);
    EXPECT_DOUBLE_EQ(c.value, 3.0);
    EXPECT_GE(c.argument, -1.0);
    EXPECT_LE(c.argument, 1.0);

    auto bumpy = [](double x) { return std::sin(x) + 0.1 * std::sin(20.0 * x); };
    const ScalarOptimum m = maximize_scalar(bumpy, 0.0, 3.0, 1e-12);
    double grid = -1e300;
    for (int i = 0; i <= 1'000'000; ++i) grid = std::max(grid, bumpy(3.0 * i / 1'000'000));
    EXPECT_GE(m.value, grid - 1e-12);
    EXPECT_LE(m.value, grid + 1e-9);
    EXPECT_NEAR(bumpy(m.argument), m.value, 0.0);
}

TEST(MinimizeScalar, MirrorsMaximize) {
    const ScalarOptimum m = minimize_scalar([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; }, -2.0, 2.0, 1e-12);
    EXPECT_NEAR(m.argument, 0.3, 1e-6);
    EXPECT_NEAR(m.value, 1.0, 1e-12);
}
