#pragma once

// Exact distributions of normalized sums of lattice variables and their
// Kolmogorov distance to the normal law. Everything here is enumeration,
// no sampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bec/constants.hpp"
#include "bec/parallel.hpp"
#include "bec/quadrature.hpp"

namespace bec {

struct Atom {
    double x = 0.0;
    double p = 0.0;
};

/// Finite discrete law with strictly increasing locations.
///
/// Masses must sum to one unless constructed as a sub-probability
/// (truncated mixtures), in which case the missing mass is reported by
/// total_mass().
class LatticeDistribution {
public:
    LatticeDistribution() = default;

    explicit LatticeDistribution(std::vector<Atom> atoms, bool sub_probability = false) {
        if (atoms.empty()) throw std::invalid_argument("LatticeDistribution: no atoms");
        std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
        for (const Atom& a : atoms) {
            if (!std::isfinite(a.x) || !(a.p >= 0.0) || !std::isfinite(a.p)) {
                throw std::invalid_argument("LatticeDistribution: invalid atom");
            }
            if (!atoms_.empty() && atoms_.back().x == a.x) {
                atoms_.back().p += a.p;
            } else {
                atoms_.push_back(a);
            }
        }
        const double total = total_mass();
        if (!sub_probability && std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("LatticeDistribution: masses must sum to 1 (got " + std::to_string(total) + ")");
        }
        if (sub_probability && total > 1.0 + 1e-12) {
            throw std::invalid_argument("LatticeDistribution: total mass exceeds 1");
        }
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    double total_mass() const {
        double s = 0.0;
        for (const Atom& a : atoms_) s += a.p;
        return s;
    }

private:
    std::vector<Atom> atoms_;
};

inline LatticeDistribution rademacher() { return LatticeDistribution({{-1.0, 0.5}, {1.0, 0.5}}); }

/// Standardized Bernoulli(p): (B − p)/√(p(1−p)).
inline LatticeDistribution two_point(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("two_point: p must lie in (0, 1)");
    const double q = 1.0 - p;
    const double s = std::sqrt(p * q);
    return LatticeDistribution({{-p / s, q}, {q / s, p}});
}

/// (E X, D X, E|X|³) of a single summand.
struct MomentProfile {
    double mu = 0.0;
    double sigma2 = 1.0;
    double beta3 = 1.0;
};

inline MomentProfile moments(const LatticeDistribution& d) {
    if (d.size() == 0) throw std::invalid_argument("moments: empty distribution");
    double mu = 0.0;
    for (const Atom& a : d.atoms()) mu += a.p * a.x;
    double var = 0.0;
    double abs3 = 0.0;
    for (const Atom& a : d.atoms()) {
        var += a.p * (a.x - mu) * (a.x - mu);
        abs3 += a.p * std::abs(a.x) * a.x * a.x;
    }
    if (!(var > 0.0)) throw std::domain_error("moments: zero variance");
    return {mu, var, abs3};
}

inline bool is_standardized(const LatticeDistribution& d, double tol = 1e-9) {
    const MomentProfile m = moments(d);
    return std::abs(m.mu) <= tol && std::abs(m.sigma2 - 1.0) <= tol;
}

/// Affine map to mean 0, variance 1; masses are unchanged.
inline LatticeDistribution standardize(const LatticeDistribution& d) {
    const MomentProfile m = moments(d);
    const double s = std::sqrt(m.sigma2);
    std::vector<Atom> out;
    out.reserve(d.size());
    for (const Atom& a : d.atoms()) out.push_back({(a.x - m.mu) / s, a.p});
    return LatticeDistribution(std::move(out));
}

/// Locations are offset + step·m for integers m ≥ 0.
struct Lattice {
    double offset = 0.0;
    double step = 1.0;
    std::vector<std::int64_t> index;  // per atom
};

inline std::optional<Lattice> detect_lattice(const LatticeDistribution& d, double rel_tol = 1e-9) {
    const auto& atoms = d.atoms();
    Lattice lat;
    lat.offset = atoms.front().x;
    if (atoms.size() == 1) {
        lat.index = {0};
        return lat;
    }
    const double span = atoms.back().x - lat.offset;
    const double tol = rel_tol * span;
    // Euclid on real differences.
    double step = atoms[1].x - lat.offset;
    for (std::size_t i = 2; i < atoms.size(); ++i) {
        double a = std::max(step, atoms[i].x - lat.offset);
        double b = std::min(step, atoms[i].x - lat.offset);
        while (b > tol) {
            const double r = std::fmod(a, b);
            if (r <= tol || b - r <= tol) break;
            a = b;
            b = r;
        }
        step = b;
        if (step <= tol) return std::nullopt;
    }
    lat.step = step;
    for (const Atom& a : atoms) {
        const double q = (a.x - lat.offset) / step;
        const double r = std::round(q);
        if (std::abs(q - r) > 1e-6) return std::nullopt;
        lat.index.push_back(static_cast<std::int64_t>(r));
    }
    return lat;
}

class NonLatticeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr std::size_t kDefaultSupportCap = 1'000'000;

namespace detail {

/// Mass vector of the base distribution on its lattice indices.
inline std::vector<double> lattice_pmf(const LatticeDistribution& d, const Lattice& lat) {
    std::vector<double> pmf(static_cast<std::size_t>(lat.index.back()) + 1, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) pmf[static_cast<std::size_t>(lat.index[i])] += d.atoms()[i].p;
    return pmf;
}

inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

inline Lattice require_lattice(const LatticeDistribution& d) {
    auto lat = detect_lattice(d);
    if (!lat) throw NonLatticeError("distribution is not supported on a common lattice");
    return *lat;
}

}  // namespace detail

/// Law of (X₁ + … + Xₙ)/√n by exact iterated convolution on lattice indices.
inline LatticeDistribution convolve_power(const LatticeDistribution& d, std::int64_t n,
                                          std::size_t support_cap = kDefaultSupportCap) {
    if (n < 1) throw std::domain_error("convolve_power: n must be positive");
    const Lattice lat = detail::require_lattice(d);
    const std::vector<double> base = detail::lattice_pmf(d, lat);
    if (static_cast<double>(n) * static_cast<double>(base.size() - 1) + 1.0 > static_cast<double>(support_cap)) {
        throw std::length_error("convolve_power: support size limit exceeded");
    }
    std::vector<double> pmf = base;
    for (std::int64_t i = 1; i < n; ++i) pmf = detail::convolve(pmf, base);
    const double nd = static_cast<double>(n);
    const double scale = 1.0 / std::sqrt(nd);
    std::vector<Atom> out;
    for (std::size_t m = 0; m < pmf.size(); ++m) {
        if (pmf[m] > 0.0) out.push_back({(nd * lat.offset + static_cast<double>(m) * lat.step) * scale, pmf[m]});
    }
    double total = 0.0;
    for (const Atom& a : out) total += a.p;
    if (std::abs(total - 1.0) > 1e-10) throw std::runtime_error("convolve_power: mass not preserved");
    // Rounding in the sum can leave |total − 1| ≈ 1e-15; renormalize onto the exact simplex.
    for (Atom& a : out) a.p /= total;
    return LatticeDistribution(std::move(out));
}

/// sup_x |F(x) − Φ(x)| with F(x) = P(X < x). Between atoms F is flat and
/// Φ monotone, so the supremum is reached at an atom from one side.
inline double kolmogorov_to_normal(const LatticeDistribution& d) {
    double below = 0.0;  // P(X < x_i)
    double sup = 0.0;
    for (const Atom& a : d.atoms()) {
        const double phi = normal_cdf(a.x);
        const double above = below + a.p;  // P(X ≤ x_i)
        sup = std::max({sup, std::abs(below - phi), std::abs(above - phi)});
        below = above;
    }
    return sup;
}

struct CompoundPoissonResult {
    LatticeDistribution law;       // sub-probability: mixture over N ≤ M
    double truncation_mass = 0.0;  // P(N_λ > M)
    std::int64_t max_count = 0;    // M
};

/// Smallest M whose Chernoff tail bound P(N ≥ M+1) ≤ e^{−λ}(eλ/(M+1))^{M+1} is ≤ tail_tol.
inline std::int64_t poisson_truncation_point(double lambda, double tail_tol) {
    if (!(lambda > 0.0)) throw std::domain_error("poisson_truncation_point: lambda must be positive");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw std::domain_error("poisson_truncation_point: tail_tol in (0,1)");
    std::int64_t m = static_cast<std::int64_t>(std::ceil(lambda));
    while (true) {
        const double k = static_cast<double>(m + 1);
        const double log_bound = -lambda + k * (1.0 + std::log(lambda) - std::log(k));
        if (k > lambda && log_bound <= std::log(tail_tol)) return m;
        ++m;
    }
}

/// Law of (S_λ − λμ)/√(λ(μ² + σ²)) for S_λ = X₁ + … + X_{N_λ}, truncated at N_λ ≤ M.
inline CompoundPoissonResult compound_poisson(const LatticeDistribution& d, double lambda, double tail_tol,
                                              std::size_t support_cap = kDefaultSupportCap) {
    if (!(lambda > 0.0)) throw std::domain_error("compound_poisson: lambda must be positive");
    const MomentProfile mp = moments(d);
    const Lattice lat = detail::require_lattice(d);
    const std::vector<double> base = detail::lattice_pmf(d, lat);
    const std::int64_t M = poisson_truncation_point(lambda, tail_tol);
    if (static_cast<double>(M) * static_cast<double>(base.size() - 1) + 1.0 > static_cast<double>(support_cap)) {
        throw std::length_error("compound_poisson: support size limit exceeded");
    }
    const double center = lambda * mp.mu;
    const double scale = 1.0 / std::sqrt(lambda * (mp.mu * mp.mu + mp.sigma2));

    std::vector<Atom> raw;
    std::vector<double> pmf{1.0};
    double kept = 0.0;
    for (std::int64_t j = 0; j <= M; ++j) {
        const double jd = static_cast<double>(j);
        const double w = std::exp(-lambda + jd * std::log(lambda) - std::lgamma(jd + 1.0));
        kept += w;
        for (std::size_t m = 0; m < pmf.size(); ++m) {
            if (pmf[m] > 0.0) raw.push_back({(jd * lat.offset + static_cast<double>(m) * lat.step - center) * scale, w * pmf[m]});
        }
        pmf = detail::convolve(pmf, base);
    }
    // Sums with different counts can land on the same point up to rounding.
    std::sort(raw.begin(), raw.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    std::vector<Atom> merged;
    for (const Atom& a : raw) {
        if (!merged.empty() && std::abs(a.x - merged.back().x) <= 1e-10 * std::max(1.0, std::abs(a.x))) {
            merged.back().p += a.p;
        } else {
            merged.push_back(a);
        }
    }
    double tail = 0.0;
    {
        double jd = static_cast<double>(M + 1);
        for (int i = 0; i < 100000; ++i, jd += 1.0) {
            const double w = std::exp(-lambda + jd * std::log(lambda) - std::lgamma(jd + 1.0));
            tail += w;
            if (jd > lambda && w < 1e-20 * std::max(tail, 1e-300)) break;
        }
    }
    CompoundPoissonResult out;
    out.law = LatticeDistribution(std::move(merged), true);
    out.truncation_mass = tail;
    out.max_count = M;
    return out;
}

struct BoundSpec {
    enum class Kind { theorem1, theorem2, classical };
    Kind kind = Kind::theorem2;
    double constant = 0.0;  // only for classical: C·β³/√n

    double value(double beta3, std::int64_t n) const {
        const double rn = std::sqrt(static_cast<double>(n));
        switch (kind) {
            case Kind::theorem1: return kTheorem1Constant * (beta3 + kTheorem1Shift) / rn;
            case Kind::theorem2: return kTheorem2Constant * (beta3 + kTheorem2Shift) / rn;
            case Kind::classical: return constant * beta3 / rn;
        }
        return 0.0;
    }
    std::string name() const {
        switch (kind) {
            case Kind::theorem1: return "theorem1";
            case Kind::theorem2: return "theorem2";
            case Kind::classical: return "classical";
        }
        return "";
    }
};

struct VerificationRow {
    std::int64_t n = 0;
    double distance = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound − distance
    bool pass = false;
};

/// Exact ρ(F_n, Φ) against the chosen bound for n = 1 … n_max.
inline std::vector<VerificationRow> verify_inequality(const LatticeDistribution& d, std::int64_t n_max,
                                                      const BoundSpec& bound, unsigned threads = 1) {
    if (!is_standardized(d)) throw std::domain_error("verify_inequality: distribution must be standardized");
    if (n_max < 1) throw std::domain_error("verify_inequality: n_max must be positive");
    const double beta3 = moments(d).beta3;
    return parallel_map(
        static_cast<std::size_t>(n_max),
        [&](std::size_t i) {
            const std::int64_t n = static_cast<std::int64_t>(i) + 1;
            VerificationRow row;
            row.n = n;
            row.distance = kolmogorov_to_normal(convolve_power(d, n));
            row.bound = bound.value(beta3, n);
            row.margin = row.bound - row.distance;
            row.pass = row.margin > 0.0;
            return row;
        },
        threads);
}

/// Laplace law with unit variance: density e^{−√2|x|}/√2.
inline double laplace_cdf(double x) {
    return x < 0.0 ? 0.5 * std::exp(std::numbers::sqrt2 * x) : 1.0 - 0.5 * std::exp(-std::numbers::sqrt2 * x);
}

/// H_r(x) = ∫₀^∞ Φ(x/√y) dG_{r,r}(y), the normal scale mixture over a
/// Gamma(shape r, rate r) variance.
inline double gamma_scale_mixture_cdf(double r, double x, double tol = 1e-12) {
    if (!(r > 0.0)) throw std::domain_error("gamma_scale_mixture_cdf: r must be positive");
    const double log_norm = r * std::log(r) - std::lgamma(r);
    // y ∈ (0,1]: y = w^{1/r}, dG = (r^{r−1}/Γ(r)) e^{−ry} dw.
    auto lower = [&](double w) {
        const double y = std::pow(w, 1.0 / r);
        return normal_cdf(x / std::sqrt(y)) * std::exp(log_norm - std::log(r) - r * y);
    };
    // y ∈ [1,∞): y = 1/v, dG = (r^r/Γ(r)) e^{−r/v} v^{−r−1} dv.
    auto upper = [&](double v) {
        return normal_cdf(x * std::sqrt(v)) * std::exp(log_norm - r / v - (r + 1.0) * std::log(v));
    };
    return integrate(lower, 0.0, 1.0, 0.5 * tol).estimate + integrate(upper, 0.0, 1.0, 0.5 * tol).estimate;
}

struct LimitLaw {
    enum class Kind { laplace, gamma_scale_mixture };
    Kind kind = Kind::laplace;
    double r = 1.0;  // gamma shape (and rate)
};

inline double limit_cdf(const LimitLaw& law, double x) {
    return law.kind == LimitLaw::Kind::laplace ? laplace_cdf(x) : gamma_scale_mixture_cdf(law.r, x);
}

}  // namespace bec
