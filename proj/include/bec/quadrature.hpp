#pragma once

// Adaptive Gauss-Kronrod integration with explicit error budgets, the
// exponential integral, scalar root finding and scalar maximization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace bec {

/// A numerical value together with an absolute error budget.
///
/// For the nonnegative integrands used throughout this library
/// `upper()` is treated as a sound upper bound on the exact value.
struct CertifiedValue {
    double estimate = 0.0;
    double error_bound = 0.0;
    bool converged = true;

    double upper() const { return estimate + error_bound; }
    double lower() const { return estimate - error_bound; }

    CertifiedValue& operator+=(const CertifiedValue& other) {
        estimate += other.estimate;
        error_bound += other.error_bound;
        converged = converged && other.converged;
        return *this;
    }
    friend CertifiedValue operator+(CertifiedValue a, const CertifiedValue& b) { return a += b; }
    friend CertifiedValue operator*(double c, CertifiedValue v) {
        v.estimate *= c;
        v.error_bound *= std::abs(c);
        return v;
    }
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, CertifiedValue partial)
        : std::runtime_error(what), partial_(partial) {}
    const CertifiedValue& partial() const { return partial_; }

private:
    CertifiedValue partial_;
};

namespace detail {

// 15-point Kronrod abscissae; odd indices are the 7-point Gauss nodes.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double estimate = 0.0;
    double error = 0.0;
};

/// Embedded 7/15 Gauss-Kronrod pair on [a, b]. The error is |K15 - G7|
/// plus a rounding allowance; no heuristic shrinking is applied.
template <class F>
Panel gauss_kronrod15(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * detail::kWgk[7];
    double gauss = fc * detail::kWg[3];
    double abs_sum = std::abs(kronrod);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * detail::kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += detail::kWgk[j] * (f1 + f2);
        abs_sum += detail::kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += detail::kWg[j / 2] * (f1 + f2);
    }
    Panel p{a, b, kronrod * half, 0.0};
    const double rounding = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum * std::abs(half);
    p.error = std::abs((kronrod - gauss) * half) + rounding;
    if (!std::isfinite(p.estimate) || !std::isfinite(p.error)) {
        p.error = std::numeric_limits<double>::infinity();
    }
    return p;
}

struct IntegrationOptions {
    double tol = 1e-9;      // absolute
    int max_panels = 4000;
};

/// Integrates f over consecutive intervals [points[i], points[i+1]],
/// subdividing the panel with the largest error until the summed error
/// is below tol. Never evaluates f at any of the points.
template <class F>
CertifiedValue integrate(F&& f, std::span<const double> points, IntegrationOptions opts = {}) {
    if (points.size() < 2) return {};
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i] >= points[i - 1])) throw std::invalid_argument("integrate: points must be nondecreasing");
    }
    auto by_error = [](const Panel& l, const Panel& r) { return l.error < r.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(by_error)> heap(by_error);
    double total_err = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i] == points[i - 1]) continue;
        Panel p = gauss_kronrod15(f, points[i - 1], points[i]);
        total_err += p.error;
        heap.push(p);
    }
    int panels = static_cast<int>(heap.size());
    while (total_err > opts.tol && panels < opts.max_panels && !heap.empty()) {
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // cannot split further
        heap.pop();
        Panel left = gauss_kronrod15(f, worst.a, mid);
        Panel right = gauss_kronrod15(f, mid, worst.b);
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    // Re-sum from scratch; the running total accumulates cancellation noise.
    CertifiedValue out;
    std::vector<Panel> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    for (const Panel& p : all) {
        out.estimate += p.estimate;
        out.error_bound += p.error;
    }
    out.converged = out.error_bound <= opts.tol && std::isfinite(out.estimate);
    return out;
}

template <class F>
CertifiedValue integrate(F&& f, double a, double b, double tol = 1e-9) {
    if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
    const double pts[2] = {a, b};
    return integrate(std::forward<F>(f), std::span<const double>(pts), IntegrationOptions{tol, 4000});
}

/// Builds a sorted breakpoint list: a, every interior point in (a, b), b.
inline std::vector<double> breakpoints(double a, double b, std::span<const double> interior) {
    std::vector<double> pts{a};
    for (double x : interior) {
        if (x > a && x < b && std::isfinite(x)) pts.push_back(x);
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

/// E1(x) = ∫_x^∞ e^{-s}/s ds for x > 0.
inline double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: argument must be positive");
    constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (x <= 1.0) {
        // -γ - ln x + Σ_{k≥1} (-1)^{k+1} x^k / (k·k!)
        double sum = 0.0;
        double term = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= -x / k;
            const double add = -term / k;
            sum += add;
            if (std::abs(add) < eps * std::abs(sum)) break;
        }
        return -kEulerGamma - std::log(x) + sum;
    }
    // Continued fraction, modified Lentz.
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h * std::exp(-x);
}

/// ∫_a^∞ e^{-u²/2} du/u = E1(a²/2)/2.
inline CertifiedValue gaussian_tail_over_t(double a) {
    if (!(a > 0.0)) throw std::domain_error("gaussian_tail_over_t: a must be positive");
    const double v = 0.5 * exp_integral_e1(0.5 * a * a);
    return {v, 64.0 * std::numeric_limits<double>::epsilon() * v, true};
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Bisection on a sign change of f over [a, b].
template <class F>
double find_root(F&& f, double a, double b, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("find_root: tol must be positive");
    double fa = f(a);
    const double fb = f(b);
    if (std::isnan(fa) || std::isnan(fb)) throw std::domain_error("find_root: NaN at bracket endpoint");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw std::domain_error("find_root: no sign change on bracket");
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = f(m);
        if (std::isnan(fm)) throw std::domain_error("find_root: NaN encountered");
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

struct ScalarOptimum {
    double argument = 0.0;
    double value = 0.0;
};

/// Maximizes f on [a, b]: a uniform scan picks the best cell, golden-section
/// search refines inside it, and the result is checked against the scan so
/// the returned value is never below the best scanned point.
template <class F>
ScalarOptimum maximize_scalar(F&& f, double a, double b, double tol, int scan_points = 201) {
    if (!(a <= b)) throw std::invalid_argument("maximize_scalar: requires a <= b");
    scan_points = std::max(scan_points, 3);
    const double h = (b - a) / (scan_points - 1);
    ScalarOptimum best{a, f(a)};
    int best_i = 0;
    for (int i = 1; i < scan_points; ++i) {
        const double x = (i == scan_points - 1) ? b : a + i * h;
        const double v = f(x);
        if (std::isnan(v)) throw std::domain_error("maximize_scalar: NaN encountered");
        if (v > best.value) {
            best = {x, v};
            best_i = i;
        }
    }
    if (h == 0.0) return best;
    double lo = a + std::max(best_i - 1, 0) * h;
    double hi = std::min(a + (best_i + 1) * h, b);
    constexpr double inv_phi = 0.6180339887498948482045868343656381;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
        if (std::isnan(f1) || std::isnan(f2)) throw std::domain_error("maximize_scalar: NaN encountered");
    }
    const double xm = 0.5 * (lo + hi);
    const double fm = f(xm);
    if (fm > best.value) best = {xm, fm};
    if (f1 > best.value) best = {x1, f1};
    if (f2 > best.value) best = {x2, f2};
    return best;
}

template <class F>
ScalarOptimum minimize_scalar(F&& f, double a, double b, double tol, int scan_points = 201) {
    auto neg = [&f](double x) { return -f(x); };
    ScalarOptimum r = maximize_scalar(neg, a, b, tol, scan_points);
    r.value = -r.value;
    return r;
}

}  // namespace bec
