#pragma once

// Majorants of |f_n(t)| and of r_n(t) = |f_n(t) − e^{−t²/2}| for a
// standardized sum with Lyapunov fraction ℓ, plus the n-uniform versions
// used to bound a supremum over all n ≥ N.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bec/constants.hpp"
#include "bec/quadrature.hpp"

namespace bec {

/// χ(t, ε): t²/2 − ϰε|t|³ up to εt = θ₀, (1 − cos εt)/ε² up to εt = 2π, then 0.
inline double chi(double t, double eps) {
    const double x = eps * std::abs(t);
    if (x <= theta0()) return 0.5 * t * t - kappa() * eps * std::abs(t) * t * t;
    if (x <= 2.0 * std::numbers::pi) return (1.0 - std::cos(x)) / (eps * eps);
    return 0.0;
}

/// Points in t > 0 where χ(·, ε) changes branch.
inline std::vector<double> chi_kinks(double eps) { return {theta0() / eps, 2.0 * std::numbers::pi / eps}; }

/// The interval of t > 0 on which 1 − (2/n)χ(t, ε) < 0, if any.
///
/// χ(·, ε) increases up to 1/(3ϰε) and decreases afterwards, so the set
/// is a single interval around that point.
inline std::optional<std::pair<double, double>> f1_negative_interval(double eps, double n) {
    const double peak = 1.0 / (3.0 * kappa() * eps);
    const double level = 0.5 * n;
    if (chi(peak, eps) <= level) return std::nullopt;
    auto excess = [&](double t) { return chi(t, eps) - level; };
    const double left = find_root(excess, 0.0, peak, 1e-14 * peak);
    const double right = find_root(excess, peak, 2.0 * std::numbers::pi / eps, 1e-14 * peak);
    return std::make_pair(left, right);
}

/// [1 − (2/n)χ(t, ε)]^{n/2}, or nullopt where the bracket is negative.
inline std::optional<double> f1(double t, double eps, std::int64_t n) {
    if (n < 1) throw std::domain_error("f1: n must be positive");
    const double bracket = 1.0 - 2.0 * chi(t, eps) / static_cast<double>(n);
    if (bracket < 0.0) return std::nullopt;
    return std::pow(bracket, 0.5 * static_cast<double>(n));
}

inline double f2(double t, double eps) { return std::exp(-chi(t, eps)); }

inline double f3(double t, double eps) {
    const double a = std::abs(t);
    return std::exp(-0.5 * a * a + kappa() * eps * a * a * a);
}

/// f1 where defined, otherwise the (weaker, still valid) f2.
inline double f1_or_f2(double t, double eps, std::int64_t n) {
    if (auto v = f1(t, eps, n)) return *v;
    return f2(t, eps);
}

/// Integrand data for prefactor · e^{−t²/2} ∫₀^{|t|} exp(log_integrand(u)) du.
struct RemainderIntegrand {
    enum class Kind {
        sharp,        // (u²/2) e^{u²/2} [1 − (2/n)χ(u, ε)]^{(n−1)/2}, f2 fallback
        exponential,  // (u²/2) e^{u²/2} exp{−((n−1)/n) χ(u, ε)}
        cubic,        // (u²/2) exp{ϰεu³ + (u²/2n)(1 − 2ϰεu)}
    };
    Kind kind = Kind::exponential;
    double prefactor = 0.0;  // ℓ, or ε for the n-uniform bound
    double chi_eps = 1.0;    // ℓ + 1/√n, or ε + (1−k)/√N
    double n = 1.0;

    double log_integrand(double u) const {
        const double log_poly = std::log(0.5 * u * u);
        switch (kind) {
            case Kind::sharp: {
                if (n == 1.0) return log_poly + 0.5 * u * u;  // zero exponent
                const double c = chi(u, chi_eps);
                const double bracket = 1.0 - 2.0 * c / n;
                if (bracket >= 0.0) return log_poly + 0.5 * u * u + 0.5 * (n - 1.0) * std::log(bracket);
                return log_poly + 0.5 * u * u - (n - 1.0) / n * c;
            }
            case Kind::exponential:
                return log_poly + 0.5 * u * u - (n - 1.0) / n * chi(u, chi_eps);
            case Kind::cubic: {
                const double ke = kappa() * chi_eps;
                return log_poly + ke * u * u * u + u * u / (2.0 * n) * (1.0 - 2.0 * ke * u);
            }
        }
        return log_poly;
    }

    /// Points where the integrand is not smooth.
    std::vector<double> kinks() const {
        if (kind == Kind::cubic) return {};
        std::vector<double> k = chi_kinks(chi_eps);
        if (kind == Kind::sharp && n > 1.0) {
            if (auto neg = f1_negative_interval(chi_eps, n)) {
                k.push_back(neg->first);
                k.push_back(neg->second);
            }
        }
        std::sort(k.begin(), k.end());
        return k;
    }
};

inline RemainderIntegrand remainder_r1(double ell, std::int64_t n) {
    const double nd = static_cast<double>(n);
    return {RemainderIntegrand::Kind::sharp, ell, ell + 1.0 / std::sqrt(nd), nd};
}
inline RemainderIntegrand remainder_r2(double ell, std::int64_t n) {
    const double nd = static_cast<double>(n);
    return {RemainderIntegrand::Kind::exponential, ell, ell + 1.0 / std::sqrt(nd), nd};
}
inline RemainderIntegrand remainder_r3(double ell, std::int64_t n) {
    const double nd = static_cast<double>(n);
    return {RemainderIntegrand::Kind::cubic, ell, ell + 1.0 / std::sqrt(nd), nd};
}

namespace detail {

inline void require_remainder_args(double ell, std::int64_t n) {
    if (!(ell >= 0.0)) throw std::domain_error("remainder bound: ell must be nonnegative");
    if (n < 1) throw std::domain_error("remainder bound: n must be positive");
}

inline void require_uniform_args(double eps, std::int64_t N, double k) {
    if (N < 1) throw std::domain_error("uniform bound: N must be positive");
    if (!(k <= 1.0)) throw std::domain_error("uniform bound: k must not exceed 1");
    if (!(eps > k / std::sqrt(static_cast<double>(N)))) {
        throw std::domain_error("uniform bound: requires eps > k/sqrt(N)");
    }
}

inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace detail

/// Evaluates a remainder bound at t by direct adaptive quadrature.
inline CertifiedValue remainder_direct(const RemainderIntegrand& r, double t, double tol = 1e-13) {
    const double s = std::abs(t);
    if (s == 0.0 || r.prefactor == 0.0) return {};
    const double shift = 0.5 * s * s;
    auto integrand = [&](double u) { return std::exp(r.log_integrand(u) - shift); };
    const std::vector<double> kinks = r.kinks();
    const std::vector<double> pts = breakpoints(0.0, s, kinks);
    CertifiedValue v = integrate(integrand, std::span<const double>(pts), IntegrationOptions{tol, 4000});
    return r.prefactor * v;
}

inline CertifiedValue r1(double t, double ell, std::int64_t n) {
    detail::require_remainder_args(ell, n);
    return remainder_direct(remainder_r1(ell, n), t);
}
inline CertifiedValue r2(double t, double ell, std::int64_t n) {
    detail::require_remainder_args(ell, n);
    return remainder_direct(remainder_r2(ell, n), t);
}
inline CertifiedValue r3(double t, double ell, std::int64_t n) {
    detail::require_remainder_args(ell, n);
    return remainder_direct(remainder_r3(ell, n), t);
}

/// Cumulative table of a remainder bound on [0, s_max].
///
/// The inner integral is tabulated once on fixed panels (log-scaled
/// prefix sums, so e^{u²/2} never overflows) and each query adds one
/// partial panel. Queries therefore cost one 15-point rule instead of a
/// fresh adaptive integration. Every returned value carries the summed
/// panel error; callers integrate `upper()`.
class RemainderTable {
public:
    RemainderTable(RemainderIntegrand spec, double s_max, double panel_width = 1.0 / 32.0)
        : spec_(spec), s_max_(s_max) {
        if (!(s_max > 0.0)) throw std::invalid_argument("RemainderTable: s_max must be positive");
        const int count = std::max(1, static_cast<int>(std::ceil(s_max / panel_width)));
        std::vector<double> interior;
        for (int i = 1; i < count; ++i) interior.push_back(s_max * i / count);
        for (double k : spec_.kinks()) interior.push_back(k);
        nodes_ = breakpoints(0.0, s_max, interior);

        constexpr double neg_inf = -std::numeric_limits<double>::infinity();
        log_value_.assign(nodes_.size(), neg_inf);
        log_error_.assign(nodes_.size(), neg_inf);
        for (std::size_t j = 0; j + 1 < nodes_.size(); ++j) {
            const double a = nodes_[j];
            const double b = nodes_[j + 1];
            const double m = std::max({log_at(a), log_at(0.5 * (a + b)), log_at(b)});
            double lv = neg_inf;
            double le = neg_inf;
            if (m > neg_inf) {
                auto scaled = [&](double u) { return std::exp(spec_.log_integrand(u) - m); };
                Panel p = gauss_kronrod15(scaled, a, b);
                CertifiedValue v{p.estimate, p.error, true};
                if (p.error > kPanelRelTol * std::abs(p.estimate)) {
                    const double pts[2] = {a, b};
                    v = integrate(scaled, std::span<const double>(pts),
                                  IntegrationOptions{std::max(kPanelRelTol * std::abs(p.estimate), 1e-300), 400});
                }
                if (v.estimate > 0.0) lv = m + std::log(v.estimate);
                if (v.error_bound > 0.0) le = m + std::log(v.error_bound);
            }
            log_value_[j + 1] = detail::log_add_exp(log_value_[j], lv);
            log_error_[j + 1] = detail::log_add_exp(log_error_[j], le);
        }
    }

    double s_max() const { return s_max_; }
    const RemainderIntegrand& spec() const { return spec_; }

    CertifiedValue operator()(double t) const {
        const double s = std::abs(t);
        if (s > s_max_ * (1.0 + 1e-12)) throw std::domain_error("RemainderTable: argument beyond tabulated range");
        if (s == 0.0 || spec_.prefactor == 0.0) return {};
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
        std::size_t j = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
        j = std::clamp<std::size_t>(j, 1, nodes_.size() - 1) - 1;
        const double shift = 0.5 * s * s;
        CertifiedValue out{std::exp(log_value_[j] - shift), std::exp(log_error_[j] - shift), true};
        const double a = nodes_[j];
        if (s > a) {
            auto partial = [&](double u) { return std::exp(spec_.log_integrand(u) - shift); };
            Panel p = gauss_kronrod15(partial, a, s);
            out.estimate += p.estimate;
            out.error_bound += p.error;
        }
        return spec_.prefactor * out;
    }

private:
    static constexpr double kPanelRelTol = 1e-12;

    double log_at(double u) const {
        const double v = spec_.log_integrand(u);
        return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    }

    RemainderIntegrand spec_;
    double s_max_;
    std::vector<double> nodes_;
    std::vector<double> log_value_;  // log of ∫_0^{nodes_[j]}
    std::vector<double> log_error_;
};

/// T(N, ε) = min{N^{1/4} ε^{−1/2}, (2ϰε)^{−1}}.
inline double cutoff_T(std::int64_t N, double eps) {
    if (N < 1) throw std::domain_error("cutoff_T: N must be positive");
    if (!(eps > 0.0)) throw std::domain_error("cutoff_T: eps must be positive");
    return std::min(std::pow(static_cast<double>(N), 0.25) / std::sqrt(eps), 1.0 / (2.0 * kappa() * eps));
}

/// Bound on sup_{n≥N} f_j(t, ε + (1−k)/√n[, n]) for j ∈ {1, 2}.
///
/// Both indices return f2(t, ε + (1−k)/√N): f1(·, n) increases towards f2
/// as n grows, so f2 at the largest admissible ε is the supremum bound.
inline double uniform_f(int j, double t, double eps, std::int64_t N, double k) {
    if (j != 1 && j != 2) throw std::domain_error("uniform_f: j must be 1 or 2");
    detail::require_uniform_args(eps, N, k);
    return f2(t, eps + (1.0 - k) / std::sqrt(static_cast<double>(N)));
}

inline RemainderIntegrand remainder_uniform_r2(double eps, std::int64_t N, double k) {
    detail::require_uniform_args(eps, N, k);
    const double nd = static_cast<double>(N);
    return {RemainderIntegrand::Kind::exponential, eps, eps + (1.0 - k) / std::sqrt(nd), nd};
}

/// Bound on sup_{n≥N} r2(t, ε − k/√n, n).
inline CertifiedValue uniform_r2(double t, double eps, std::int64_t N, double k) {
    return remainder_direct(remainder_uniform_r2(eps, N, k), t);
}

/// Bound on sup_{n≥N} r3(t, ε − 1/√n, n), valid for |t| ≤ T(N, ε).
inline double uniform_r3(double t, double eps, std::int64_t N) {
    const double a = std::abs(t);
    if (a > cutoff_T(N, eps) * (1.0 + 1e-12)) throw std::domain_error("uniform_r3: |t| exceeds cutoff T(N, eps)");
    return std::expm1(kappa() * eps * a * a * a) * std::exp(-0.5 * a * a) / (6.0 * kappa());
}

}  // namespace bec
