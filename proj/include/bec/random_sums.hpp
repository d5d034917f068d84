#pragma once

// Closed-form accuracy bounds for Poisson and mixed Poisson random sums.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bec/constants.hpp"
#include "bec/empirical.hpp"
#include "bec/quadrature.hpp"

namespace bec {

/// K = Σ_{k≥2} (k+1)³/k! = 15e − 9.
inline double compound_moment_series_constant() { return 15.0 * std::numbers::e - 9.0; }

namespace detail {

inline double third_moment_scale(const MomentProfile& m) {
    if (!(m.sigma2 > 0.0)) throw std::domain_error("moment profile: sigma2 must be positive");
    if (!(m.beta3 >= 0.0)) throw std::domain_error("moment profile: beta3 must be nonnegative");
    return std::pow(m.mu * m.mu + m.sigma2, 1.5);
}

}  // namespace detail

/// ρ(F_λ, Φ) ≤ 0.3051 β³ / ((μ² + σ²)^{3/2} √λ).
inline double poisson_be_bound(const MomentProfile& m, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("poisson_be_bound: lambda must be positive");
    return kTheorem2Constant * m.beta3 / (detail::third_moment_scale(m) * std::sqrt(lambda));
}

/// E|Y_{ν,1} − μν|³ ≤ νβ³(1 + 40ν) for the compound Poisson(ν) summand, ν ≤ 1.
inline double compound_third_moment_bound(const MomentProfile& m, double nu) {
    if (!(nu > 0.0 && nu <= 1.0)) throw std::domain_error("compound_third_moment_bound: nu must lie in (0, 1]");
    if (!(m.beta3 >= 0.0)) throw std::domain_error("compound_third_moment_bound: beta3 must be nonnegative");
    return nu * m.beta3 * (1.0 + 40.0 * nu);
}

/// E|Z_{ν,1}|³ ≤ β³(1 + 40λ/n)√n / ((μ² + σ²)^{3/2} √λ) for n ≥ λ.
inline double standardized_third_moment_bound(const MomentProfile& m, double lambda, double n) {
    if (!(lambda > 0.0)) throw std::domain_error("standardized_third_moment_bound: lambda must be positive");
    if (!(n >= lambda)) throw std::domain_error("standardized_third_moment_bound: requires n >= lambda");
    return m.beta3 * (1.0 + 40.0 * lambda / n) * std::sqrt(n) / (detail::third_moment_scale(m) * std::sqrt(lambda));
}

/// The finite-n bound 0.3051(E|Z|³ + 1)/√n whose n → ∞ limit is poisson_be_bound.
inline double poisson_bound_at_n(const MomentProfile& m, double lambda, double n) {
    const double z3 = standardized_third_moment_bound(m, lambda, n);
    return kTheorem2Constant * (z3 + 1.0) / std::sqrt(n);
}

/// Δ_t ≤ 0.3051 β³ E[Λ_t^{−1/2}] + 0.5 δ_t.
inline double theorem5_bound(double beta3, double inv_sqrt_moment, double delta_t) {
    if (!(beta3 >= 0.0) || !(inv_sqrt_moment >= 0.0) || !(delta_t >= 0.0)) {
        throw std::domain_error("theorem5_bound: inputs must be nonnegative");
    }
    return kTheorem2Constant * beta3 * inv_sqrt_moment + 0.5 * delta_t;
}

/// E[Λ_t^{−1/2}] = Γ(r − ½)/(Γ(r)√t) for Λ_t ~ Gamma(shape r, scale t).
inline double gamma_inverse_sqrt_moment(double r, double t) {
    if (!(r > 0.5)) throw std::domain_error("gamma_inverse_sqrt_moment: requires r > 1/2");
    if (!(t > 0.0)) throw std::domain_error("gamma_inverse_sqrt_moment: t must be positive");
    return std::exp(std::lgamma(r - 0.5) - std::lgamma(r)) / std::sqrt(t);
}

/// Q(ε) = max{1/ε, √(1+ε) / ((1 + √(1−ε)) √(2πe(1−ε)))}.
inline double q_factor(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("q_factor: eps must lie in (0, 1)");
    const double second = std::sqrt(1.0 + eps) /
                          ((1.0 + std::sqrt(1.0 - eps)) * std::sqrt(2.0 * std::numbers::pi * std::numbers::e * (1.0 - eps)));
    return std::max(1.0 / eps, second);
}

/// Structural (mixing) inputs of a mixed Poisson model.
struct StructuralSpec {
    double ell = 1.0;           // EΛ_t = ℓt
    double s = 1.0;             // DΛ_t = s²t
    double E_abs_V = 1.0;       // E|V| of the limiting structural law
    double delta_t = 0.0;       // Kolmogorov distance of the structural law to its limit
    double mean_abs_dev = 0.0;  // E|Λ_t − t|/√t
};

struct EpsilonOptimum {
    double value = 0.0;    // full bound including the δ term
    double epsilon = 0.0;  // minimizing ε
};

namespace detail {

inline constexpr double kEpsLo = 1e-6;
inline constexpr double kEpsHi = 1.0 - 1e-6;

template <class F>
EpsilonOptimum minimize_over_epsilon(F&& objective) {
    const ScalarOptimum opt = minimize_scalar(objective, kEpsLo, kEpsHi, 1e-13, 64);
    return {opt.value, opt.argument};
}

inline void require_nonzero_mean(const MomentProfile& m) {
    if (m.mu == 0.0) throw std::domain_error("mu = 0: use the zero-mean bound instead");
}

}  // namespace detail

/// The bracketed expression minimized over ε, already divided by √t.
inline double theorem6_objective(const MomentProfile& m, const StructuralSpec& spec, double t, double eps) {
    const double a = kTheorem2Constant * m.beta3 / (detail::third_moment_scale(m) * std::sqrt((1.0 - eps) * spec.ell));
    return (a + spec.s / spec.ell * (spec.E_abs_V / eps + q_factor(eps))) / std::sqrt(t);
}

/// ρ_t ≤ δ̃_t + t^{−1/2} inf_ε{0.3051β³/((μ²+σ²)^{3/2}√((1−ε)ℓ)) + (s/ℓ)(E|V|/ε + Q(ε))}.
inline EpsilonOptimum theorem6_bound(const MomentProfile& m, const StructuralSpec& spec, double t) {
    detail::require_nonzero_mean(m);
    if (!(spec.ell > 0.0) || !(spec.s >= 0.0) || !(spec.E_abs_V >= 0.0) || !(spec.delta_t >= 0.0)) {
        throw std::domain_error("theorem6_bound: invalid structural spec");
    }
    if (!(t > 0.0)) throw std::domain_error("theorem6_bound: t must be positive");
    EpsilonOptimum r = detail::minimize_over_epsilon([&](double e) { return theorem6_objective(m, spec, t, e); });
    r.value += spec.delta_t;
    return r;
}

inline double theorem8_objective(const MomentProfile& m, double E_abs_V, double mean_abs_dev, double t, double eps) {
    const double a = kTheorem2Constant * m.beta3 / (detail::third_moment_scale(m) * std::sqrt(1.0 - eps));
    return (a + E_abs_V / eps + q_factor(eps) * mean_abs_dev) / std::sqrt(t);
}

/// ρ̃_t ≤ δ̂_t + t^{−1/2} inf_ε{0.3051β³/((μ²+σ²)^{3/2}√(1−ε)) + E|V|/ε + Q(ε)·E|Λ_t−t|/√t}.
inline EpsilonOptimum theorem8_bound(const MomentProfile& m, double E_abs_V, double mean_abs_dev, double delta_hat,
                                     double t) {
    detail::require_nonzero_mean(m);
    if (!(E_abs_V >= 0.0) || !(mean_abs_dev >= 0.0) || !(delta_hat >= 0.0)) {
        throw std::domain_error("theorem8_bound: inputs must be nonnegative");
    }
    if (!(t > 0.0)) throw std::domain_error("theorem8_bound: t must be positive");
    EpsilonOptimum r =
        detail::minimize_over_epsilon([&](double e) { return theorem8_objective(m, E_abs_V, mean_abs_dev, t, e); });
    r.value += delta_hat;
    return r;
}

/// Symmetric heavy-tailed structural limit V with density
/// ((α−1)/2)(1+|x|)^{−α}, 2 < α < 3: finite mean, infinite variance.
class HeavyTailStructure {
public:
    explicit HeavyTailStructure(double alpha) : alpha_(alpha) {
        if (!(alpha > 2.0 && alpha < 3.0)) throw std::domain_error("HeavyTailStructure: alpha must lie in (2, 3)");
    }

    double alpha() const { return alpha_; }

    double density(double x) const { return 0.5 * (alpha_ - 1.0) * std::pow(1.0 + std::abs(x), -alpha_); }

    double cdf(double x) const {
        const double tail = 0.5 * std::pow(1.0 + std::abs(x), 1.0 - alpha_);
        return x < 0.0 ? tail : 1.0 - tail;
    }

    /// E|V| = 1/(α − 2).
    double abs_mean() const { return 1.0 / (alpha_ - 2.0); }

    /// Shift c_t in (Λ_t − t)/√t = max{−√t, V} + c_t.
    double shift(double t) const {
        return (std::sqrt(t) * (2.0 * alpha_ + 1.0) / alpha_ - 1.0) / (2.0 * std::pow(t, 0.5 * (alpha_ + 1.0)));
    }

    /// E|Λ_t − t|/√t = E|max{−√t, V} + c_t|.
    double mean_abs_dev(double t) const {
        if (!(t > 0.0)) throw std::domain_error("HeavyTailStructure: t must be positive");
        const double c = shift(t);
        const double root = std::sqrt(t);
        // Atom at −√t from the truncation.
        double total = cdf(-root) * std::abs(c - root);
        total += abs_linear_integral(0.0, std::numeric_limits<double>::infinity(), c);
        total += abs_linear_integral(-root, 0.0, c);
        return total;
    }

    /// δ̂_t = sup_v |P((Λ_t − t)/√t < v) − P(V < v)|.
    double delta_hat(double t) const {
        const double c = shift(t);
        const double root = std::sqrt(t);
        const double edge = cdf(-root + c);
        const double a = std::abs(c);
        const double bulk = cdf(0.5 * a) - cdf(-0.5 * a);
        return std::max(edge, bulk);
    }

private:
    // Antiderivatives on y ≥ 0 of q(y) = ((α−1)/2)(1+y)^{−α} and y·q(y).
    double q0(double y) const { return -0.5 * std::pow(1.0 + y, 1.0 - alpha_); }
    double q1(double y) const {
        if (std::isinf(y)) return 0.0;
        return 0.5 * (alpha_ - 1.0) * std::pow(1.0 + y, 2.0 - alpha_) / (2.0 - alpha_) +
               0.5 * std::pow(1.0 + y, 1.0 - alpha_);
    }
    double q0_inf(double y) const { return std::isinf(y) ? 0.0 : q0(y); }

    /// ∫_{y=a}^{b} |y·σ + c| q(|y|) dy for a range on one side of 0.
    double abs_linear_integral(double lo, double hi, double c) const {
        // Map to y = |x| ∈ [ylo, yhi] with x = sign·y.
        const bool negative = hi <= 0.0;
        const double ylo = negative ? -hi : lo;
        const double yhi = negative ? -lo : hi;
        // |sign·y + c| = |y − z| with z = −sign·c.
        const double z = negative ? c : -c;
        auto piece = [&](double a, double b, bool y_above_z) {
            if (b <= a) return 0.0;
            const double m1 = q1(b) - q1(a);
            const double m0 = q0_inf(b) - q0_inf(a);
            return y_above_z ? m1 - z * m0 : z * m0 - m1;
        };
        const double split = std::clamp(z, ylo, yhi);
        return piece(ylo, split, false) + piece(split, yhi, true);
    }

    double alpha_;
};

}  // namespace bec
