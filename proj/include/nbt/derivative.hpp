#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>

namespace nbt {

struct DerivativeEstimate {
    double value;
    double error;
};

namespace detail {

// Ridders' scheme: a Neville tableau over the step sequence h, h/c, h/c^2, ...
// For an estimator whose error is even in h, each column cancels the next
// power of h^2. Returns the entry with the smallest estimated error and stops
// once the error starts growing (roundoff has taken over).
template <class Stencil>
DerivativeEstimate richardson_tableau(Stencil&& stencil, double h) {
    constexpr int max_rows = 10;
    constexpr double shrink = 1.4;
    constexpr double shrink2 = shrink * shrink;
    constexpr double safe = 2.0;

    if (!(h > 0.0) || !std::isfinite(h)) throw std::domain_error("finite difference step must be positive");
    std::array<std::array<double, max_rows>, max_rows> a{};
    a[0][0] = stencil(h);
    DerivativeEstimate best{a[0][0], std::numeric_limits<double>::max()};
    for (int i = 1; i < max_rows; ++i) {
        h /= shrink;
        if (h == 0.0) throw std::domain_error("finite difference step underflow");
        a[0][i] = stencil(h);
        double fac = shrink2;
        for (int j = 1; j <= i; ++j) {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= shrink2;
            const double err = std::fmax(std::fabs(a[j][i] - a[j - 1][i]),
                                         std::fabs(a[j][i] - a[j - 1][i - 1]));
            if (err <= best.error) best = {a[j][i], err};
        }
        if (std::fabs(a[i][i] - a[i - 1][i - 1]) >= safe * best.error) break;
    }
    return best;
}

}  // namespace detail

/// f'(x) from central differences with Richardson extrapolation, starting
/// at step h.
template <std::invocable<double> F>
DerivativeEstimate derivative(F&& f, double x, double h) {
    return detail::richardson_tableau(
        [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); }, h);
}

/// f''(x) from the symmetric three-point second difference, extrapolated the
/// same way.
template <std::invocable<double> F>
DerivativeEstimate second_derivative(F&& f, double x, double h) {
    const double fx = f(x);
    return detail::richardson_tableau(
        [&](double step) { return (f(x + step) - 2.0 * fx + f(x - step)) / (step * step); }, h);
}

}  // namespace nbt
