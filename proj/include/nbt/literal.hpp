#pragma once

// The analytic Lambda / Upsilon / D expressions for the mean energy and the
// susceptibility, transcribed term by term as printed. No algebraic
// simplification and no correction: these exist for reproduction and audit,
// the Standard thermodynamics in thermo.hpp is what the numbers should be.
//
// Every Gaussian factor and erfi is carried as a SignedLog, so the products
// never overflow even where the factors individually would.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nbt/erfi.hpp"
#include "nbt/logspace.hpp"
#include "nbt/spectrum.hpp"

namespace nbt {

struct LambdaSet {
    SignedLog l1, l2, l3, l4, l5, l6;
    SignedLog y1, y2, y3, y4;
    double d1, d2, d3, d4, d5;
};

class LiteralSingularity : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline LambdaSet lambda_set(const PhysicalSystem& sys, double beta, int n_cutoff) {
    if (!(beta > 0.0)) throw std::invalid_argument("lambda_set: beta must be positive");
    if (n_cutoff < 0) throw std::invalid_argument("lambda_set: cutoff must be non-negative");
    const auto p = spectrum_params(sys);
    const double c0 = p.c0;
    const double c1 = p.c1;
    const double nn = n_cutoff;
    const double alpha = sys.alpha;
    const double bc = beta * c0;
    const double pi = std::numbers::pi;

    const auto V = [](double v) { return SignedLog::from_value(v); };
    const auto E = [](double x) { return SignedLog::from_log(x); };
    const auto erfi_log = [](double x) { return erfi_scaled(x).as_signed_log(); };

    LambdaSet s{};
    s.d1 = 2.0 * nn + c1 + 3.0;
    s.d2 = c1 + 1.0;
    s.d3 = sys.hbar * sys.hbar * alpha * alpha * beta / sys.mass;
    s.d4 = sys.hbar * sys.c_light * alpha / sys.charge;
    const double shifted_ky = sys.ky - sys.b0 / s.d2;
    s.d5 = sys.hbar * sys.hbar * beta / sys.mass * shifted_ky * shifted_ky;
    const double d1 = s.d1, d2 = s.d2, d3 = s.d3, d4 = s.d4, d5 = s.d5;

    s.y1 = erfi_log(std::sqrt(bc / 2.0) * d1);
    s.y2 = erfi_log(std::sqrt(bc / 2.0) * d2);
    s.y3 = erfi_log(0.5 * d1 * std::sqrt(d3));
    s.y4 = erfi_log(0.5 * d2 * std::sqrt(d3));
    const SignedLog y12 = s.y1 - s.y2;
    const SignedLog y34 = s.y3 - s.y4;

    // mean energy numerator and denominator
    {
        const double k = 2.0 * nn + 3.0;
        const SignedLog t1 = V(0.25 * c0 * k * (c1 + d1)) * E(-0.5 * bc * k * (c1 + d1));
        const SignedLog t2 = V(0.125 * c0 * (c1 + d2)) * E(-0.25 * bc * (c1 + d2));
        const SignedLog t3 = -(V(0.25 / std::sqrt(2.0 * bc) * std::sqrt(pi) * c0 * c1 * c1) * E(0.5 * bc * c1 * c1) * y12);
        const auto bracket = [&](double d) {
            return V(0.5 * c0 * d / std::sqrt(bc) - 0.25 * beta * c0 * c0 * d / std::pow(bc, 1.5));
        };
        const SignedLog inner = E(0.5 * bc * c1 * c1) * (E(0.5 * bc * d1 * d1) * bracket(d1) -
                                                          E(-0.5 * bc * d2 * d2) * bracket(d2)) +
                                V(0.25 * std::sqrt(pi / (2.0 * bc * bc * bc))) * E(0.5 * bc * c1 * c1) * V(c0) * y12;
        const SignedLog t4 = -(V(1.0 / std::sqrt(2.0 * bc)) * inner);
        s.l1 = t1 + t2 + t3 + t4;

        s.l2 = V(0.5) * E(-0.5 * bc * k * (c1 + d1)) + V(0.5) * E(-0.25 * bc * (c1 + d2)) +
               V(1.0 / (2.0 * std::sqrt(2.0 * bc))) * V(std::sqrt(pi)) * E(-0.25 * bc * c1 * c1) * y12;
    }

    // susceptibility pieces
    {
        const double k = 2.0 * nn + 3.0;
        const double d4sq = d4 * d4;
        s.l3 = V(d3 * std::pow(k, 4) / (2.0 * d4sq * alpha * alpha)) * E(-d3 / 4.0 * k * (c1 + d1)) +
               V(d3 * d3 / (8.0 * d4sq * alpha * alpha)) * E(-d3 / 8.0 * (c1 + d2)) +
               V(std::sqrt(pi * d3) / (d4sq * alpha * alpha)) * E(d5) * y34 -
               V(std::sqrt(pi) * c1 * c1 * std::pow(d3, 1.5) / (2.0 * d4sq * std::pow(alpha, 6))) * E(d5) * y34;

        s.l4 = V(beta / 2.0) * (E(-d3 / 8.0 * (c1 + d2)) + E(-d3 / 2.0 * k * (nn + c1)) +
                                V(std::sqrt(pi) / d3) * E(d5) * y34);

        s.l5 = V(1.0 / (2.0 * d4 * alpha)) *
               (V(d3 / 2.0) * E(-d3 / 8.0 * (c1 + d2)) + V(d3 * k) * E(-d3 / 4.0 * k * (c1 + d1)) -
                V(std::sqrt(pi * d3) * c1) * E(d5) * y34 +
                V(2.0) * E(d5) * (E(0.25 * d1 * d2 * d2) - E(0.25 * d3 * d1 * d1)));

        s.l6 = V(beta / 2.0) * (E(-d3 / 4.0 * k * (c1 + d1)) + E(-d3 / 8.0 * (c1 + d2)) +
                                V(std::sqrt(pi) / d3) * E(d5) * y34);
    }
    return s;
}

/// Lambda1 / Lambda2 in log form.
inline SignedLog literal_mean_energy(const LambdaSet& s) {
    if (s.l2.is_zero()) throw LiteralSingularity("literal mean energy: Lambda2 vanishes");
    return s.l1 / s.l2;
}

/// -Lambda3/Lambda4 + (Lambda5/Lambda6)^2 in log form.
inline SignedLog literal_susceptibility(const LambdaSet& s) {
    if (s.l4.is_zero()) throw LiteralSingularity("literal susceptibility: Lambda4 vanishes");
    if (s.l6.is_zero()) throw LiteralSingularity("literal susceptibility: Lambda6 vanishes");
    const SignedLog ratio = s.l5 / s.l6;
    return -(s.l3 / s.l4) + ratio * ratio;
}

}  // namespace nbt
