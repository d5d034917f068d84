#pragma once

// Universal constants of the smoothing-inequality pipeline.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "bec/quadrature.hpp"

namespace bec {

/// g(θ) = θ² + 2θ sin θ + 6(cos θ − 1); its root in [π, 2π] is θ₀.
inline double theta_equation(double theta) {
    return theta * theta + 2.0 * theta * std::sin(theta) + 6.0 * (std::cos(theta) - 1.0);
}

/// Equivalent form 3(1 − cos θ) − θ sin θ − θ²/2 = −g(θ)/2.
inline double theta_equation_alt(double theta) {
    return 3.0 * (1.0 - std::cos(theta)) - theta * std::sin(theta) - 0.5 * theta * theta;
}

inline double compute_theta0(double tol = 1e-12) {
    if (!(tol > 0.0)) throw std::invalid_argument("compute_theta0: tol must be positive");
    return find_root(theta_equation, std::numbers::pi, 2.0 * std::numbers::pi, tol);
}

/// (cos x − 1 + x²/2)/x³, continued by its limit 0 at x = 0.
inline double kappa_ratio(double x) {
    if (x == 0.0) return 0.0;
    if (std::abs(x) < 1.0) {
        // Σ_{k≥2} (−1)^k x^{2k−3}/(2k)!; the direct form cancels badly here.
        double term = x / 24.0;
        double sum = term;
        for (int k = 3; k < 30; ++k) {
            term *= -x * x / ((2.0 * k - 1.0) * (2.0 * k));
            sum += term;
            if (std::abs(term) < std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::cos(x) - 1.0 + 0.5 * x * x) / (x * x * x);
}

inline double compute_kappa(double theta0) { return kappa_ratio(theta0); }

/// Dense-grid maximum of kappa_ratio over (0, x_max]; cross-check only.
inline double kappa_grid_sup(double x_max = 4.0 * std::numbers::pi, int points = 200000) {
    double best = 0.0;
    for (int i = 1; i <= points; ++i) {
        best = std::max(best, kappa_ratio(x_max * i / points));
    }
    return best;
}

/// (√10 + 3)/(6√(2π)), the lower bound for the classical constant.
inline double esseen_lower_constant() {
    return (std::sqrt(10.0) + 3.0) / (6.0 * std::sqrt(2.0 * std::numbers::pi));
}

inline double bhattacharya_objective(double x) { return normal_cdf(x) - x * x / (1.0 + x * x); }

/// sup_{x>0} (Φ(x) − x²/(1+x²)).
inline double bhattacharya_bound() {
    return maximize_scalar(bhattacharya_objective, 0.0, 10.0, 1e-12, 2001).value;
}

struct UniversalConstants {
    double theta0;
    double kappa;
    double esseen_lower;
    double bhattacharya_bound;
};

/// Computed on first use, immutable afterwards.
inline const UniversalConstants& universal_constants() {
    static const UniversalConstants c = [] {
        const double theta0 = compute_theta0(1e-12);
        return UniversalConstants{theta0, compute_kappa(theta0), esseen_lower_constant(),
                                  ::bec::bhattacharya_bound()};
    }();
    return c;
}

inline double theta0() { return universal_constants().theta0; }
inline double kappa() { return universal_constants().kappa; }

// Small-ε regime: ρ ≤ (0.2727 β³ + 0.2041)/√n for n ≥ 400, β³ + 1 ≤ 0.1√n.
inline constexpr double kLemma6Slope = 0.2727;
inline constexpr double kLemma6Intercept = 0.2041;
inline constexpr double kLemma6BoundAtOne = 0.4768;  // 0.2727 + 0.2041, as printed
inline constexpr double kUniversalBound = 0.5409;   // rounded-up Bhattacharya bound used in the proofs
inline constexpr double kTheorem1Constant = 0.335789;
inline constexpr double kTheorem1Shift = 0.425;
inline constexpr double kTheorem2Constant = 0.3051;
inline constexpr double kTheorem2Shift = 1.0;

/// Constant C_k valid for ε = (β³+k)/√n ≤ 0.05(1+k), or nullopt when the
/// small-ε regime does not cover (k, ε).
inline std::optional<double> lemma6_regime(double k, double epsilon) {
    if (!(k >= 0.0 && k <= 1.0)) throw std::domain_error("lemma6_regime: k must lie in [0, 1]");
    if (!(epsilon > 0.0)) throw std::domain_error("lemma6_regime: epsilon must be positive");
    if (epsilon > 0.05 * (1.0 + k)) return std::nullopt;
    if (k >= 0.75) return kLemma6Slope;
    if (k <= 0.74) return kLemma6BoundAtOne / (1.0 + k);
    return std::nullopt;
}

}  // namespace bec
