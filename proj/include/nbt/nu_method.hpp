#pragma once

// Parametric Nikiforov-Uvarov machinery for the template equation
//
//   psi'' + (a1 - a2 s) / (s (1 - a3 s)) psi'
//         + (-x1 s^2 + x2 s - x3) / (s (1 - a3 s))^2 psi = 0
//
// Everything here is a pure function of six numeric coefficients.

#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string>

#include "nbt/polynomials.hpp"
#include "nbt/roots.hpp"

namespace nbt {

struct NuCoefficients {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
};

/// Auxiliary parameters. sqrt_a8 / sqrt_a9 are NaN when the radicand is
/// negative; the starred and unstarred exponent sets are then NaN too.
struct NuDerived {
    double a4, a5, a6, a7, a8, a9;
    double sqrt_a8, sqrt_a9;
    std::complex<double> k_minus, k_plus;
    double a10, a11, a12, a13;
    double a10s, a11s, a12s, a13s;

    bool k_complex() const { return a8 * a9 < 0.0; }
    bool branch_real() const { return a8 >= 0.0 && a9 >= 0.0; }
};

/// KMinus: k = -(a7 + 2 a3 a8) - 2 sqrt(a8 a9), unstarred parameter set.
/// KPlus:  k = -(a7 + 2 a3 a8) + 2 sqrt(a8 a9), starred parameter set.
enum class NuBranch { KMinus, KPlus };

class BranchError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline NuDerived derive_parameters(const NuCoefficients& c) {
    const auto check = [](double v, const char* name) {
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string("NuCoefficients.") + name + " is not finite");
    };
    check(c.a1, "a1");
    check(c.a2, "a2");
    check(c.a3, "a3");
    check(c.x1, "x1");
    check(c.x2, "x2");
    check(c.x3, "x3");

    NuDerived d{};
    d.a4 = 0.5 * (1.0 - c.a1);
    d.a5 = 0.5 * (c.a2 - 2.0 * c.a3);
    d.a6 = d.a5 * d.a5 + c.x1;
    d.a7 = 2.0 * d.a4 * d.a5 - c.x2;
    d.a8 = d.a4 * d.a4 + c.x3;
    d.a9 = c.a3 * d.a7 + c.a3 * c.a3 * d.a8 + d.a6;

    const std::complex<double> root = 2.0 * std::sqrt(std::complex<double>(d.a8 * d.a9, 0.0));
    const double base = -(d.a7 + 2.0 * c.a3 * d.a8);
    d.k_minus = base - root;
    d.k_plus = base + root;

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    d.sqrt_a8 = d.a8 >= 0.0 ? std::sqrt(d.a8) : nan;
    d.sqrt_a9 = d.a9 >= 0.0 ? std::sqrt(d.a9) : nan;

    d.a10 = c.a1 + 2.0 * d.a4 + 2.0 * d.sqrt_a8;
    d.a11 = c.a2 - 2.0 * d.a5 + 2.0 * (d.sqrt_a9 + c.a3 * d.sqrt_a8);
    d.a12 = d.a4 + d.sqrt_a8;
    d.a13 = d.a5 - (d.sqrt_a9 + c.a3 * d.sqrt_a8);

    d.a10s = c.a1 + 2.0 * d.a4 - 2.0 * d.sqrt_a8;
    d.a11s = c.a2 - 2.0 * d.a5 + 2.0 * (d.sqrt_a9 - c.a3 * d.sqrt_a8);
    d.a12s = d.a4 - d.sqrt_a8;
    d.a13s = d.a5 - (d.sqrt_a9 - c.a3 * d.sqrt_a8);
    return d;
}

namespace detail {
inline void require_real_branch(const NuDerived& d) {
    if (!d.branch_real())
        throw BranchError("NU branch invalid: sqrt(a8) or sqrt(a9) is imaginary (a8 = " +
                          std::to_string(d.a8) + ", a9 = " + std::to_string(d.a9) + ")");
}
}  // namespace detail

/// Derivative of tau(s) for the chosen branch. The branch is admissible only
/// when the value is strictly negative; zero is the degenerate boundary.
struct TauPrime {
    double value;
    bool admissible() const { return value < 0.0; }
};

inline TauPrime tau_prime_condition(const NuCoefficients& c, const NuDerived& d, NuBranch branch) {
    detail::require_real_branch(d);
    const double radical = branch == NuBranch::KMinus ? d.sqrt_a9 + c.a3 * d.sqrt_a8
                                                      : d.sqrt_a9 - c.a3 * d.sqrt_a8;
    return {-(c.a2 - 2.0 * d.a5) - 2.0 * radical};
}

/// Left-hand side of the quantization condition. Zero for an eigenstate.
///
/// The KPlus form carries a trailing +a5 that has no counterpart in the
/// KMinus form; both are kept exactly as stated for the method. The
/// asymmetry is invisible whenever a2 = 2 a3 (a5 = 0).
inline double eigenvalue_residual(const NuCoefficients& c, int n, NuBranch branch) {
    if (n < 0) throw std::invalid_argument("eigenvalue_residual: n must be non-negative");
    const NuDerived d = derive_parameters(c);
    detail::require_real_branch(d);
    const double nn = n;
    const double root89 = d.sqrt_a8 * d.sqrt_a9;
    if (branch == NuBranch::KMinus) {
        return c.a2 * nn - (2.0 * nn + 1.0) * d.a5 + (2.0 * nn + 1.0) * (d.sqrt_a9 + c.a3 * d.sqrt_a8) +
               nn * (nn - 1.0) * c.a3 + d.a7 + 2.0 * c.a3 * d.a8 + 2.0 * root89;
    }
    return c.a2 * nn - 2.0 * d.a5 * nn + (2.0 * nn + 1.0) * (d.sqrt_a9 - c.a3 * d.sqrt_a8) +
           nn * (nn - 1.0) * c.a3 + d.a7 + 2.0 * c.a3 * d.a8 - 2.0 * root89 + d.a5;
}

enum class PolynomialFamily { Jacobi, Laguerre };

/// Unnormalized psi(s) = s^power * w(s) * poly(s), where for Jacobi
///   w = (1 - a3 s)^(-power - tail/a3),  poly = P_n^(jacobi_a, jacobi_b)(1 - 2 a3 s)
/// and for the a3 = 0 limit
///   w = exp(tail s),  poly = L_n^laguerre_index(laguerre_scale s).
struct WavefunctionForm {
    PolynomialFamily family;
    int degree;
    double a3;
    double power;
    double tail;
    double jacobi_a = 0.0;
    double jacobi_b = 0.0;
    double laguerre_index = 0.0;
    double laguerre_scale = 0.0;
};

/// For KPlus the second Jacobi index is built from the unstarred a10, as the
/// method states it: (a10* - 1, a11*/a3 - a10 - 1).
inline WavefunctionForm wavefunction_descriptor(const NuCoefficients& c, const NuDerived& d, int n,
                                                NuBranch branch) {
    if (n < 0) throw std::invalid_argument("wavefunction_descriptor: n must be non-negative");
    detail::require_real_branch(d);
    const bool minus = branch == NuBranch::KMinus;
    const double a10 = minus ? d.a10 : d.a10s;
    const double a11 = minus ? d.a11 : d.a11s;

    WavefunctionForm form{};
    form.degree = n;
    form.a3 = c.a3;
    form.power = minus ? d.a12 : d.a12s;
    form.tail = minus ? d.a13 : d.a13s;
    if (c.a3 == 0.0) {
        form.family = PolynomialFamily::Laguerre;
        form.laguerre_index = a10 - 1.0;
        form.laguerre_scale = a11;
    } else {
        form.family = PolynomialFamily::Jacobi;
        form.jacobi_a = a10 - 1.0;
        form.jacobi_b = a11 / c.a3 - d.a10 - 1.0;
    }
    return form;
}

inline double evaluate_wavefunction(const WavefunctionForm& form, double s) {
    if (!(s > 0.0)) throw std::domain_error("evaluate_wavefunction: s must be positive");
    if (form.family == PolynomialFamily::Laguerre) {
        return std::pow(s, form.power) * std::exp(form.tail * s) *
               laguerre(form.degree, form.laguerre_index, form.laguerre_scale * s);
    }
    const double t = form.a3 * s;
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("evaluate_wavefunction: Jacobi form needs 0 < a3*s < 1");
    // (1 - t)^(-tail/a3) written through log1p so the a3 -> 0 limit stays accurate
    const double weight = std::exp((-form.power - form.tail / form.a3) * std::log1p(-t));
    return std::pow(s, form.power) * weight * jacobi(form.degree, form.jacobi_a, form.jacobi_b, 1.0 - 2.0 * t);
}

/// Solve eigenvalue_residual(coefficients(E), n, branch) = 0 for E inside a
/// caller-supplied bracket.
template <class CoefficientMap>
    requires std::invocable<CoefficientMap, double>
RootResult solve_eigenvalue(CoefficientMap&& coefficients, int n, NuBranch branch, double lo, double hi,
                            double residual_tol = 1e-12) {
    return find_root([&](double e) { return eigenvalue_residual(coefficients(e), n, branch); }, lo, hi,
                     residual_tol);
}

}  // namespace nbt
