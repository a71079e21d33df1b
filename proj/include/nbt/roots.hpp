#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string>

namespace nbt {

struct RootResult {
    double x;
    double residual;
    int iterations;
};

/// Bracketed root of a continuous scalar function. Each step tries a secant
/// update from the bracket ends and falls back to bisection whenever the
/// secant point leaves the bracket or fails to shrink it by half.
///
/// Stops when |f(x)| <= residual_tol or the bracket has collapsed to a
/// couple of ulps.
template <std::invocable<double> F>
RootResult find_root(F&& f, double lo, double hi, double residual_tol = 1e-12,
                     int max_iter = 400) {
    if (!(lo < hi)) throw std::invalid_argument("find_root: bracket must satisfy lo < hi");
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) return {lo, 0.0, 0};
    if (f_hi == 0.0) return {hi, 0.0, 0};
    if (std::signbit(f_lo) == std::signbit(f_hi))
        throw std::domain_error("find_root: bracket [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "] does not straddle a sign change");

    double x = 0.5 * (lo + hi);
    double fx = f(x);
    double last_width = hi - lo;
    for (int it = 1; it <= max_iter; ++it) {
        if (std::fabs(fx) <= residual_tol) return {x, fx, it};
        if (std::signbit(fx) == std::signbit(f_lo)) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        const double width = hi - lo;
        if (width <= 4.0 * std::numeric_limits<double>::epsilon() *
                         std::fmax(std::fabs(lo), std::fabs(hi)))
            return {x, fx, it};

        double trial = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        if (!(trial > lo && trial < hi) || width > 0.5 * last_width) trial = 0.5 * (lo + hi);
        last_width = width;
        x = trial;
        fx = f(x);
    }
    return {x, fx, max_iter};
}

}  // namespace nbt
