#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace nbt {

/// A real number stored as sign * exp(log_abs). Zero is log_abs = -inf.
struct SignedLog {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static SignedLog zero() { return {}; }

    static SignedLog from_value(double v) {
        if (v == 0.0) return {};
        return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
    }

    /// exp(log_abs) with the given sign, no range check on log_abs.
    static SignedLog from_log(double log_abs, int sign = 1) {
        if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity()) return {};
        return {log_abs, sign > 0 ? 1 : -1};
    }

    bool is_zero() const { return sign == 0; }

    /// Overflows to +-inf / underflows to 0 like exp() would.
    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

    SignedLog operator-() const { return {log_abs, -sign}; }

    SignedLog& operator*=(const SignedLog& o) {
        if (sign == 0 || o.sign == 0) return *this = {};
        log_abs += o.log_abs;
        sign *= o.sign;
        return *this;
    }
    SignedLog& operator/=(const SignedLog& o) {
        if (o.sign == 0) {
            log_abs = std::numeric_limits<double>::infinity();
            return *this;
        }
        if (sign == 0) return *this;
        log_abs -= o.log_abs;
        sign *= o.sign;
        return *this;
    }

    SignedLog& operator+=(const SignedLog& o) {
        if (o.sign == 0) return *this;
        if (sign == 0) return *this = o;
        const double hi = std::fmax(log_abs, o.log_abs);
        const double lo = std::fmin(log_abs, o.log_abs);
        const int hi_sign = log_abs >= o.log_abs ? sign : o.sign;
        if (sign == o.sign) {
            log_abs = hi + std::log1p(std::exp(lo - hi));
            sign = hi_sign;
        } else {
            if (hi == lo) return *this = {};
            // |a| - |b| with |a| > |b|
            log_abs = hi + std::log(-std::expm1(lo - hi));
            sign = hi_sign;
        }
        return *this;
    }
    SignedLog& operator-=(const SignedLog& o) { return *this += -o; }

    /// Multiply by exp(x).
    SignedLog scaled(double x) const {
        if (sign == 0) return *this;
        return {log_abs + x, sign};
    }

    friend SignedLog operator+(SignedLog a, const SignedLog& b) { return a += b; }
    friend SignedLog operator-(SignedLog a, const SignedLog& b) { return a -= b; }
    friend SignedLog operator*(SignedLog a, const SignedLog& b) { return a *= b; }
    friend SignedLog operator/(SignedLog a, const SignedLog& b) { return a /= b; }
};

/// log(sum_i exp(x_i)); returns -inf for an empty range.
inline double log_sum_exp(std::span<const double> xs) {
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t top = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] > hi) hi = xs[i], top = i;
    if (!std::isfinite(hi)) return hi;
    // log1p keeps full relative precision when the largest term dominates
    double rest = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (i != top) rest += std::exp(xs[i] - hi);
    return hi + std::log1p(rest);
}

}  // namespace nbt
