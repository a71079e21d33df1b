#pragma once

// Canonical partition function over the level parabola E(x) of spectrum.hpp:
//   exact sum        sum_{n=0}^{N} exp(-beta E(n))
//   Poisson          (f(0) + f(N+1))/2 + int_0^{N+1} f,  f(x) = exp(-beta E(x)),
//                    the integral by adaptive quadrature
//   closed form      the same Poisson expression with the integral done in
//                    terms of erfi (physical sign) or erf (mirrored sign)
//
// Everything is computed relative to a reference level E(x_ref), the lowest
// level in the retained range, so the working quantity
//   r = ln Q + beta E(x_ref)
// is O(ln N) instead of O(beta E).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nbt/erfi.hpp"
#include "nbt/logspace.hpp"
#include "nbt/quadrature.hpp"
#include "nbt/spectrum.hpp"

namespace nbt {

enum class QMethod { ExactSum, PoissonQuadrature, ErfiClosed };

inline std::string_view to_string(QMethod m) {
    switch (m) {
        case QMethod::ExactSum: return "exact";
        case QMethod::PoissonQuadrature: return "poisson";
        case QMethod::ErfiClosed: return "closed";
    }
    return "?";
}

/// value overflows to +inf for very large Q; log_value stays finite.
/// fallback is set when the closed form lost its digits to cancellation and
/// the quadrature path produced the number instead.
struct PartitionResult {
    double value;
    double log_value;
    QMethod method;
    int n_cutoff;
    double beta;
    bool fallback = false;
};

/// ((f(0) + f(N+1))/2 + integral of f over [0, N+1]).
template <std::invocable<double> F>
double poisson_sum(F&& f, int n_cutoff, const QuadratureSpec& quadrature = {},
                   std::vector<double> breakpoints = {}) {
    if (n_cutoff < 0) throw std::invalid_argument("poisson_sum: cutoff must be non-negative");
    const double upper = n_cutoff + 1.0;
    const double ends = 0.5 * (f(0.0) + f(upper));
    return ends + integrate(f, 0.0, upper, quadrature, std::move(breakpoints)).value;
}

namespace detail {

inline void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("partition: beta must be positive and finite (got " + std::to_string(beta) + ")");
}

// log(erfi(z1) - erfi(z0)) - zm^2, zm the argument of larger magnitude.
// zi^2 - zm^2 is passed in precomputed (it is formed from u-differences).
// Returns the relative size of the difference against its larger term in
// `retained` so the caller can detect cancellation.
inline SignedLog erfi_difference_reduced(double z1, double z0, double d1, double d0, double& retained) {
    const auto term = [](double z, double d) {
        if (z == 0.0) return SignedLog::zero();
        return SignedLog::from_log(erfi_log_reduced(z) + d, z > 0.0 ? 1 : -1);
    };
    const SignedLog t1 = term(z1, d1);
    const SignedLog t0 = term(z0, d0);
    const SignedLog diff = t1 - t0;
    const double big = std::fmax(t1.log_abs, t0.log_abs);
    retained = diff.is_zero() ? 0.0 : std::exp(diff.log_abs - big);
    return diff;
}

}  // namespace detail

/// Lowest level of the retained range: over n = 0..N for the exact sum, over
/// the interval [0, N+1] for the Poisson family.
inline double reference_point(const LevelModel& m, int n_cutoff, QMethod method) {
    if (n_cutoff < 0) throw std::invalid_argument("partition: cutoff must be non-negative");
    if (method == QMethod::ExactSum) {
        int best = 0;
        for (int n = 1; n <= n_cutoff; ++n)
            if (m.relative(n, best) < 0.0) best = n;
        return best;
    }
    const double upper = n_cutoff + 1.0;
    if (m.sign < 0.0) return m.relative(upper, 0.0) < 0.0 ? upper : 0.0;
    return std::clamp(m.vertex(), 0.0, upper);
}

struct ReducedLogQ {
    double value;  ///< ln Q + beta E(x_ref)
    bool fallback = false;
};

inline ReducedLogQ reduced_log_q_exact(const LevelModel& m, double beta, int n_cutoff, double x_ref) {
    std::vector<double> terms(static_cast<std::size_t>(n_cutoff) + 1);
    for (int n = 0; n <= n_cutoff; ++n) terms[n] = -beta * m.relative(n, x_ref);
    return {log_sum_exp(terms)};
}

inline ReducedLogQ reduced_log_q_poisson(const LevelModel& m, double beta, int n_cutoff, double x_ref,
                                         const QuadratureSpec& quadrature = {}) {
    const auto f = [&](double x) { return std::exp(-beta * m.relative(x, x_ref)); };
    std::vector<double> breaks{x_ref, m.vertex()};
    return {std::log(poisson_sum(f, n_cutoff, quadrature, std::move(breaks)))};
}

/// Closed form of the Poisson expression. With u = 2x + 1 + C1 and
/// a = beta C0 / 4 the exponent is -sign a (u^2 - C1^2), so
///   physical: int = sqrt(pi)/(4 sqrt a) e^{-a C1^2} [erfi(sqrt(a) u1) - erfi(sqrt(a) u0)]
///   mirrored: int = sqrt(pi)/(4 sqrt a) e^{+a C1^2} [erf(sqrt(a) u1)  - erf(sqrt(a) u0)]
/// with u0 = 1 + C1, u1 = 2N + 3 + C1. Gaussian factors are combined as
/// a (u - v)(u + v) so nothing large is ever exponentiated.
inline ReducedLogQ reduced_log_q_closed(const LevelModel& m, double beta, int n_cutoff, double x_ref,
                                        const QuadratureSpec& fallback_quadrature = {}) {
    constexpr double cancellation_limit = 1e-14;
    const double upper = n_cutoff + 1.0;
    const double a = 0.25 * beta * m.c0;
    const double sa = std::sqrt(a);
    const double u0 = 1.0 + m.c1;
    const double u1 = 2.0 * upper + 1.0 + m.c1;
    const double ur = 2.0 * x_ref + 1.0 + m.c1;
    const double z0 = sa * u0;
    const double z1 = sa * u1;
    const double log_prefactor = std::log(std::sqrt(std::numbers::pi) / (4.0 * sa));

    SignedLog integral;
    double retained = 1.0;
    if (m.sign < 0.0) {
        const double um = std::fabs(u1) >= std::fabs(u0) ? u1 : u0;
        const auto gap = [&](double u) { return a * (u - um) * (u + um); };
        const SignedLog diff = detail::erfi_difference_reduced(z1, z0, gap(u1), gap(u0), retained);
        integral = diff.scaled(log_prefactor + a * (um - ur) * (um + ur));
    } else if (z0 < 0.0 && z1 > 0.0) {
        // straddles the vertex: erf(z1) + erf(|z0|), no cancellation
        integral = SignedLog::from_value(std::erf(z1) + std::erf(-z0)).scaled(log_prefactor + a * ur * ur);
    } else {
        // same side: erf(q) - erf(p) = erfc(p) - erfc(q) with 0 <= p < q
        const double up = std::fabs(u0) < std::fabs(u1) ? std::fabs(u0) : std::fabs(u1);
        const double uq = std::fabs(u0) < std::fabs(u1) ? std::fabs(u1) : std::fabs(u0);
        const double p = sa * up;
        const double q = sa * uq;
        const SignedLog tp = SignedLog::from_log(erfc_log_reduced(p));
        const SignedLog tq = SignedLog::from_log(erfc_log_reduced(q) - a * (uq - up) * (uq + up));
        const SignedLog diff = tp - tq;
        retained = diff.is_zero() ? 0.0 : std::exp(diff.log_abs - tp.log_abs);
        integral = diff.scaled(log_prefactor + a * (ur - up) * (ur + up));
    }
    if (!(retained > cancellation_limit) || integral.sign <= 0 || !std::isfinite(integral.log_abs)) {
        auto r = reduced_log_q_poisson(m, beta, n_cutoff, x_ref, fallback_quadrature);
        r.fallback = true;
        return r;
    }
    SignedLog total = integral;
    total += SignedLog::from_log(std::log(0.5) - beta * m.relative(0.0, x_ref));
    total += SignedLog::from_log(std::log(0.5) - beta * m.relative(upper, x_ref));
    return {total.log_abs};
}

inline ReducedLogQ reduced_log_q(const LevelModel& m, double beta, int n_cutoff, QMethod method, double x_ref,
                                 const QuadratureSpec& quadrature = {}) {
    detail::check_beta(beta);
    if (n_cutoff < 0) throw std::invalid_argument("partition: cutoff must be non-negative");
    switch (method) {
        case QMethod::ExactSum: return reduced_log_q_exact(m, beta, n_cutoff, x_ref);
        case QMethod::PoissonQuadrature: return reduced_log_q_poisson(m, beta, n_cutoff, x_ref, quadrature);
        case QMethod::ErfiClosed: return reduced_log_q_closed(m, beta, n_cutoff, x_ref, quadrature);
    }
    throw std::invalid_argument("partition: unknown method");
}

inline PartitionResult partition(const LevelModel& m, double beta, int n_cutoff, QMethod method,
                                 const QuadratureSpec& quadrature = {}) {
    detail::check_beta(beta);
    const double x_ref = reference_point(m, n_cutoff, method);
    const auto r = reduced_log_q(m, beta, n_cutoff, method, x_ref, quadrature);
    const double log_q = r.value - beta * m.energy(x_ref);
    return {std::exp(log_q), log_q, method, n_cutoff, beta, r.fallback};
}

inline PartitionResult partition_exact(const PhysicalSystem& sys, double beta, int n_cutoff) {
    return partition(level_model(sys), beta, n_cutoff, QMethod::ExactSum);
}

inline PartitionResult partition_poisson_quadrature(const PhysicalSystem& sys, double beta, int n_cutoff,
                                                    const QuadratureSpec& quadrature = {}) {
    return partition(level_model(sys), beta, n_cutoff, QMethod::PoissonQuadrature, quadrature);
}

inline PartitionResult partition_closed(const PhysicalSystem& sys, double beta, int n_cutoff) {
    return partition(level_model(sys), beta, n_cutoff, QMethod::ErfiClosed);
}

}  // namespace nbt
