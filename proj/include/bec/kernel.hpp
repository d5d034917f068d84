#pragma once

// Prawitz smoothing kernel on (0, 1).

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bec {

namespace detail {

inline void require_open_unit(double t, const char* who) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error(std::string(who) + ": t must lie in (0, 1)");
}

/// cot(x) − 1/x, with a series below x = π·1e-4 where both terms blow up.
inline double cot_minus_inverse(double x) {
    if (std::abs(x) < std::numbers::pi * 1e-4) {
        const double x2 = x * x;
        return -x * (1.0 / 3.0 + x2 * (1.0 / 45.0 + x2 * 2.0 / 945.0));
    }
    return 1.0 / std::tan(x) - 1.0 / x;
}

}  // namespace detail

/// |K(t)| with K(t) = ½(1−t) + (i/2)[(1−t)cot(πt) + 1/π].
inline double kernel_abs(double t) {
    detail::require_open_unit(t, "kernel_abs");
    const double re = 0.5 * (1.0 - t);
    double im;
    if (t > 0.5) {
        // With s = 1−t the bracket equals −s·(cot πs − 1/(πs)); avoids cancellation near t = 1.
        const double s = 1.0 - t;
        im = 0.5 * (-s * detail::cot_minus_inverse(std::numbers::pi * s));
    } else {
        im = 0.5 * ((1.0 - t) / std::tan(std::numbers::pi * t) + std::numbers::inv_pi);
    }
    return std::hypot(re, im);
}

/// |K(t) − i/(2πt)| = ½(1−t)√(1 + (cot πt − 1/(πt))²); tends to ½ as t → 0⁺.
inline double smoothing_weight(double t) {
    detail::require_open_unit(t, "smoothing_weight");
    const double c = detail::cot_minus_inverse(std::numbers::pi * t);
    return 0.5 * (1.0 - t) * std::sqrt(1.0 + c * c);
}

}  // namespace bec
