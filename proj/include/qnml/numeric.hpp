#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace qnml::numeric {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// ln(e^a + e^b) without overflow.
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == neg_inf) return a;
    return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) return neg_inf;
    const double m = *std::max_element(xs.begin(), xs.end());
    if (m == neg_inf) return neg_inf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// n ln n with the 0 ln 0 = 0 convention.
inline double xlogx(double n) { return n > 0.0 ? n * std::log(n) : 0.0; }

/// Γ(y + 1/2) / Γ(y) for y >= 0 (zero at the pole y = 0).
///
/// Shifts y upward with Γ(y+1/2)/Γ(y) = y/(y+1/2) · Γ(y+3/2)/Γ(y+1) and then
/// applies the large-argument expansion, which keeps full double accuracy
/// where exp(lgamma(y+1/2) - lgamma(y)) loses ~11 digits for y in the
/// thousands.
inline double gamma_half_ratio(double y) {
    if (y <= 0.0) return 0.0;
    double scale = 1.0;
    while (y < 128.0) {
        scale *= y / (y + 0.5);
        y += 1.0;
    }
    const double t = 1.0 / y;
    // sqrt(y) * (1 - 1/(8y) + 1/(128y^2) + 5/(1024y^3) - 21/(32768y^4)
    //            - 399/(262144y^5) + 869/(4194304y^6))
    const double series =
        1.0 + t * (-1.0 / 8.0 +
              t * (1.0 / 128.0 +
              t * (5.0 / 1024.0 +
              t * (-21.0 / 32768.0 +
              t * (-399.0 / 262144.0 +
              t * (869.0 / 4194304.0))))));
    return scale * std::sqrt(y) * series;
}

/// Checked multiply; returns false on overflow of the bound.
inline bool mul_bounded(std::uint64_t a, std::uint64_t b, std::uint64_t bound, std::uint64_t& out) {
    if (a != 0 && b > bound / a) return false;
    out = a * b;
    return out <= bound;
}

}  // namespace qnml::numeric
