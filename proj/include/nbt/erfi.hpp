#pragma once

// Imaginary error function erfi(x) = (2/sqrt(pi)) int_0^x exp(t^2) dt and the
// Dawson integral F(x) = exp(-x^2) int_0^x exp(t^2) dt, so that
// erfi(x) = (2/sqrt(pi)) exp(x^2) F(x).
//
// |x| < series_limit : Maclaurin series of erfi (all terms positive).
// |x| >= series_limit: asymptotic series of F, truncated at its smallest term.
// At the switch point the asymptotic series' smallest term is ~1e-18.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nbt/logspace.hpp"

namespace nbt {

namespace detail {

inline constexpr double erfi_series_limit = 6.5;

// sum_{k>=0} x^(2k+1) / (k! (2k+1)), without the 2/sqrt(pi) factor
inline double erfi_maclaurin_sum(double x) {
    const double x2 = x * x;
    double power = x;  // x^(2k+1)/k!
    double sum = x;
    for (int k = 1; k < 2000; ++k) {
        power *= x2 / k;
        const double term = power / (2.0 * k + 1.0);
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
}

// 2x F(x) = sum_k (2k-1)!! / (2x^2)^k, x > 0 large
inline double dawson_asymptotic_scaled(double x) {
    const double inv = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        const double next = term * (2.0 * k - 1.0) * inv;
        if (next >= term) break;  // past the smallest term
        term = next;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

}  // namespace detail

/// Dawson integral F(x); odd, bounded, F(x) ~ 1/(2x) for large x.
inline double dawson(double x) {
    const double ax = std::fabs(x);
    if (ax < detail::erfi_series_limit) {
        return std::exp(-ax * ax) * detail::erfi_maclaurin_sum(x);
    }
    return std::copysign(detail::dawson_asymptotic_scaled(ax) / (2.0 * ax), x);
}

/// erfi(x) represented as sign * exp(log_magnitude); exact in log form for
/// any finite x. erfi(0) has log_magnitude = -inf.
struct ErfiScaled {
    double x;
    double log_magnitude;
    int sign;

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
    SignedLog as_signed_log() const { return SignedLog::from_log(log_magnitude, sign); }
};

inline ErfiScaled erfi_scaled(double x) {
    if (x == 0.0) return {x, -std::numeric_limits<double>::infinity(), 1};
    const int sign = x > 0.0 ? 1 : -1;
    const double ax = std::fabs(x);
    if (ax < detail::erfi_series_limit) {
        return {x, std::log(2.0 / std::sqrt(std::numbers::pi) * detail::erfi_maclaurin_sum(ax)), sign};
    }
    // log(2 F(x)/sqrt(pi)) with 2 F(x) = scaled / x
    const double log_factor = std::log(detail::dawson_asymptotic_scaled(ax) / (ax * std::sqrt(std::numbers::pi)));
    return {x, ax * ax + log_factor, sign};
}

/// log|erfi(x)| - x^2, the slowly varying part; x must be nonzero.
/// Keeping x^2 separate lets callers cancel it exactly against other
/// Gaussian exponents.
inline double erfi_log_reduced(double x) {
    const double ax = std::fabs(x);
    if (ax < detail::erfi_series_limit)
        return std::log(2.0 / std::sqrt(std::numbers::pi) * detail::erfi_maclaurin_sum(ax)) - ax * ax;
    return std::log(detail::dawson_asymptotic_scaled(ax) / (ax * std::sqrt(std::numbers::pi)));
}

/// erfi(x) as a plain double; throws std::overflow_error once the result
/// exceeds the double range (|x| a little above 26), use erfi_scaled there.
inline double erfi(double x) {
    const double ax = std::fabs(x);
    if (ax < detail::erfi_series_limit) return 2.0 / std::sqrt(std::numbers::pi) * detail::erfi_maclaurin_sum(x);
    const double x2 = ax * ax;
    const double x2_low = std::fma(ax, ax, -x2);  // x^2 = x2 + x2_low exactly
    const double log_factor = std::log(detail::dawson_asymptotic_scaled(ax) / (ax * std::sqrt(std::numbers::pi)));
    if (x2 + log_factor > std::log(std::numeric_limits<double>::max()))
        throw std::overflow_error("erfi(" + std::to_string(x) + ") overflows double precision; use erfi_scaled");
    return std::copysign(std::exp(x2) * std::exp(x2_low + log_factor), x);
}

/// log(erfc(x)) + x^2 for x >= 0 (the log of the scaled complementary error
/// function). Continued fraction for x >= 2, evaluated bottom-up.
inline double erfc_log_reduced(double x) {
    if (!(x >= 0.0)) throw std::domain_error("erfc_log_reduced: x must be non-negative");
    if (x < 2.0) return std::log(std::erfc(x)) + x * x;
    // erfcx(x) = 1 / (sqrt(pi) (x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...)))))
    const int depth = x < 4.0 ? 400 : 120;
    double tail = x;
    for (int k = depth; k >= 1; --k) tail = x + 0.5 * k / tail;
    return -std::log(std::sqrt(std::numbers::pi) * tail);
}

/// log(erfc(x)) for x >= 0, valid far beyond the range where erfc underflows.
inline double log_erfc(double x) { return erfc_log_reduced(x) - x * x; }

}  // namespace nbt
