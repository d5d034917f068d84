#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "bec/kernel.hpp"

using namespace bec;

constexpr double pi = std::numbers::pi;

namespace {

// Direct complex evaluation in long double.
std::complex<long double> kernel_oracle(long double t) {
    const long double p = std::numbers::pi_v<long double>;
    return {0.5L * (1.0L - t), 0.5L * ((1.0L - t) / std::tan(p * t) + 1.0L / p)};
}

}  // namespace

TEST(Kernel, MatchesComplexOracle) {
    for (int i = 1; i < 1000; ++i) {
        const double t = i / 1000.0;
        const double oracle = static_cast<double>(std::abs(kernel_oracle(t)));
        EXPECT_NEAR(kernel_abs(t), oracle, 1e-12 * std::max(1.0, oracle)) << "t=" << t;
    }
}

TEST(Kernel, SpecialPoints) {
    EXPECT_NEAR(kernel_abs(0.5), std::sqrt(1.0 / 16.0 + 1.0 / (4.0 * pi * pi)), 1e-14);
    EXPECT_NEAR(kernel_abs(0.5), 0.29636, 1e-5);
    EXPECT_NEAR(kernel_abs(0.01) / 15.9155, 1.0, 0.02);
    EXPECT_LT(kernel_abs(1.0 - 1e-9), 1e-8);
    EXPECT_LT(kernel_abs(1.0 - 1e-4), 1e-4);
}

TEST(Kernel, RealPartLowerBound) {
    for (int i = 1; i < 2000; ++i) {
        const double t = i / 2000.0;
        EXPECT_GE(kernel_abs(t), 0.5 * (1.0 - t) * (1.0 - 1e-15));
    }
}

TEST(Kernel, DomainErrors) {
    EXPECT_THROW(kernel_abs(0.0), std::domain_error);
    EXPECT_THROW(kernel_abs(1.0), std::domain_error);
    EXPECT_THROW(kernel_abs(-0.3), std::domain_error);
    EXPECT_THROW(smoothing_weight(0.0), std::domain_error);
    EXPECT_THROW(smoothing_weight(1.2), std::domain_error);
    EXPECT_THROW(smoothing_weight(std::nan("")), std::domain_error);
}

TEST(SmoothingWeight, EqualsDistanceToPole) {
    for (int i = 1; i < 1000; ++i) {
        const long double t = i / 1000.0L;
        const std::complex<long double> pole(0.0L, 1.0L / (2.0L * std::numbers::pi_v<long double> * t));
        const double oracle = static_cast<double>(std::abs(kernel_oracle(t) - pole));
        EXPECT_NEAR(smoothing_weight(static_cast<double>(t)), oracle, 1e-12) << "t=" << static_cast<double>(t);
    }
}

TEST(SmoothingWeight, TriangleInequalityAgainstPole) {
    for (int i = 1; i < 1000; ++i) {
        const double t = i / 1000.0;
        const double pole = 1.0 / (2.0 * pi * t);
        const double w = smoothing_weight(t);
        EXPECT_LE(w, kernel_abs(t) + pole + 1e-12);
        EXPECT_GE(w, std::abs(kernel_abs(t) - pole) - 1e-12);
    }
}

TEST(SmoothingWeight, LimitsAndRange) {
    EXPECT_NEAR(smoothing_weight(1e-12), 0.5, 1e-6);
    EXPECT_TRUE(std::isfinite(smoothing_weight(1e-300)));
    EXPECT_NEAR(smoothing_weight(0.5), 0.25 * std::sqrt(1.0 + 4.0 / (pi * pi)), 1e-14);
    EXPECT_NEAR(smoothing_weight(0.5), 0.29636, 1e-5);
    EXPECT_NEAR(smoothing_weight(1.0 - 1e-7), 1.0 / (2.0 * pi), 1e-6);
    for (int i = 1; i < 1000; ++i) {
        const double w = smoothing_weight(i / 1000.0);
        EXPECT_GE(w, 0.0);
        EXPECT_LE(w, 0.5);
    }
}

TEST(SmoothingWeight, SeriesBranchIsContinuous) {
    const double edge = 1e-4;
    // the weight falls with slope ≈ −½ near 0, so the jump across 2e−13 is ≈ 1e−13
    const double a = edge * (1.0 - 1e-9), b = edge * (1.0 + 1e-9);
    EXPECT_NEAR(smoothing_weight(a) - smoothing_weight(b), 0.5 * (b - a), 1e-15);
}
