#pragma once

// Charged particle in B(x) = B0 exp(-alpha x) z-hat, gauge A_y = (B0/alpha)(1 - exp(-alpha x)).
// With s = exp(-alpha x) the transverse equation reduces to the NU template
// with a1 = 1, a2 = a3 = 0.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nbt/nu_method.hpp"

namespace nbt {

/// Overall sign of the closed-form levels.
///
/// Physical:  E'_n = -C0 (n + 1/2)(n + 1/2 + C1), the quantization of the
///            transverse equation (Morse-like bound levels, positive and
///            increasing up to the parabola vertex for C1 < -1).
/// Mirrored:  E'_n = +C0 (n + 1/2)(n + 1/2 + C1), the same parabola reflected;
///            it is the quantization of the transverse equation for -E'.
enum class EnergySign { Physical, Mirrored };

inline double sign_factor(EnergySign s) { return s == EnergySign::Physical ? -1.0 : 1.0; }

/// Defaults are dimensionless units (hbar = m = e = c = kB = 1).
struct PhysicalSystem {
    double mass = 1.0;
    double charge = 1.0;
    double b0 = 2.5;
    double alpha = 1.0;
    double ky = 0.1;
    double kz = 0.0;
    double hbar = 1.0;
    double c_light = 1.0;
    double kB = 1.0;
    EnergySign sign = EnergySign::Physical;

    void validate() const {
        const auto finite = [](double v, const char* name) {
            if (!std::isfinite(v)) throw std::invalid_argument(std::string("PhysicalSystem.") + name + " is not finite");
        };
        finite(mass, "mass");
        finite(charge, "charge");
        finite(b0, "b0");
        finite(alpha, "alpha");
        finite(ky, "ky");
        finite(kz, "kz");
        finite(hbar, "hbar");
        finite(c_light, "c_light");
        finite(kB, "kB");
        if (!(alpha > 0.0))
            throw std::invalid_argument("PhysicalSystem.alpha must be > 0 (the uniform-field limit alpha = 0 is not supported)");
        if (!(mass > 0.0)) throw std::invalid_argument("PhysicalSystem.mass must be > 0");
        if (!(hbar > 0.0)) throw std::invalid_argument("PhysicalSystem.hbar must be > 0");
        if (!(c_light > 0.0)) throw std::invalid_argument("PhysicalSystem.c_light must be > 0");
        if (!(kB > 0.0)) throw std::invalid_argument("PhysicalSystem.kB must be > 0");
    }
};

/// e B0 / (alpha hbar c), the wavenumber scale of the vector potential.
inline double field_wavenumber(const PhysicalSystem& sys) {
    return sys.charge * sys.b0 / (sys.alpha * sys.hbar * sys.c_light);
}

struct SpectrumParams {
    double c0;  ///< alpha^2 hbar^2 / 2m
    double c1;  ///< (2/alpha)(ky - e B0/(alpha hbar c))
};

inline SpectrumParams spectrum_params(const PhysicalSystem& sys) {
    sys.validate();
    return {sys.alpha * sys.alpha * sys.hbar * sys.hbar / (2.0 * sys.mass),
            2.0 / sys.alpha * (sys.ky - field_wavenumber(sys))};
}

/// dC1/dB0; C0 does not depend on the field.
inline double c1_field_slope(const PhysicalSystem& sys) {
    return -2.0 * sys.charge / (sys.alpha * sys.alpha * sys.hbar * sys.c_light);
}

inline double vector_potential(const PhysicalSystem& sys, double x) {
    return sys.b0 / sys.alpha * -std::expm1(-sys.alpha * x);
}

inline double magnetic_field(const PhysicalSystem& sys, double x) { return sys.b0 * std::exp(-sys.alpha * x); }

/// The continuous level parabola E(x) = sign * C0 (x + 1/2)(x + 1/2 + C1) + shift.
/// Differences against a reference point are formed as a single product so
/// no large cancelling terms appear.
struct LevelModel {
    double c0;
    double c1;
    double sign;  ///< -1 physical, +1 mirrored
    double shift = 0.0;

    double energy(double x) const { return sign * c0 * (x + 0.5) * (x + 0.5 + c1) + shift; }

    /// E(x) - E(ref)
    double relative(double x, double ref) const { return sign * c0 * (x - ref) * (x + ref + 1.0 + c1); }

    /// Position of the parabola's extremum.
    double vertex() const { return -0.5 * c1 - 0.5; }

    /// dE/dC1 at x (used for field derivatives).
    double c1_slope(double x) const { return sign * c0 * (x + 0.5); }
};

inline LevelModel level_model(const PhysicalSystem& sys, double shift = 0.0) {
    const auto p = spectrum_params(sys);
    return {p.c0, p.c1, sign_factor(sys.sign), shift};
}

struct EnergyLevel {
    int n;
    double e_plane;  ///< E'_n
    double e_total;  ///< E'_n + hbar^2 kz^2 / 2m
};

inline double longitudinal_energy(const PhysicalSystem& sys) {
    return sys.hbar * sys.hbar * sys.kz * sys.kz / (2.0 * sys.mass);
}

inline EnergyLevel energy_level(const PhysicalSystem& sys, int n) {
    if (n < 0) throw std::invalid_argument("energy_level: n must be non-negative");
    const double e = level_model(sys).energy(n);
    return {n, e, e + longitudinal_energy(sys)};
}

/// xi coefficients of the transverse equation
///   phi'' + phi'/s + (-xi1 - xi2 s - xi3 s^2) phi / s^2 = 0.
struct TransverseXi {
    double xi1, xi2, xi3;
};

/// With b = e B0/(alpha hbar c):
///   xi1 = ((ky - b)^2 - 2 m E'/hbar^2) / alpha^2   (physical sign)
///   xi2 = 2 b (ky - b) / alpha^2
///   xi3 = b^2 / alpha^2
/// The mirrored convention flips the sign of the E' term.
inline TransverseXi transverse_xi(const PhysicalSystem& sys, double e_plane) {
    sys.validate();
    const double b = field_wavenumber(sys);
    const double a2 = sys.alpha * sys.alpha;
    const double q = sys.ky - b;
    const double kinetic = 2.0 * sys.mass * e_plane / (sys.hbar * sys.hbar);
    return {(q * q + sign_factor(sys.sign) * kinetic) / a2, 2.0 * b * q / a2, b * b / a2};
}

/// Map onto the template positionally: the s^2 numerator coefficient -xi3
/// becomes -x1, the linear -xi2 becomes +x2, the constant -xi1 becomes -x3.
inline NuCoefficients reduce(const PhysicalSystem& sys, double e_plane) {
    const auto xi = transverse_xi(sys, e_plane);
    return {1.0, 0.0, 0.0, xi.xi3, -xi.xi2, xi.xi1};
}

struct CutoffPolicy {
    enum class Kind { Explicit, Vertex };
    Kind kind = Kind::Vertex;
    int n = 0;

    static CutoffPolicy explicit_n(int n) {
        if (n < 0) throw std::invalid_argument("cutoff must be non-negative");
        return {Kind::Explicit, n};
    }
    static CutoffPolicy vertex() { return {Kind::Vertex, 0}; }
};

/// The vertex cutoff keeps n = 0 .. floor(-C1/2 - 1/2): every level on the
/// monotone limb of the parabola. For the physical sign these are exactly the
/// states with a positive (normalizable) exponent.
inline int level_cutoff(const PhysicalSystem& sys, const CutoffPolicy& policy) {
    if (policy.kind == CutoffPolicy::Kind::Explicit) return policy.n;
    const auto p = spectrum_params(sys);
    if (!(p.c1 < -1.0))
        throw std::domain_error("vertex cutoff: no natural cutoff for C1 = " + std::to_string(p.c1) +
                                " (needs C1 < -1); pass an explicit cutoff instead");
    return static_cast<int>(std::floor(-0.5 * p.c1 - 0.5));
}

/// E'_n recovered from the NU quantization condition rather than the closed
/// form. Searches sqrt(xi1) in [0, lambda_max] on both branches.
/// Assumes e B0 > 0 (xi3 > 0).
inline double nu_energy(const PhysicalSystem& sys, int n) {
    const auto p = spectrum_params(sys);
    const double b = field_wavenumber(sys);
    if (!(b > 0.0)) throw std::domain_error("nu_energy: needs e*B0 > 0");
    const double q = sys.ky - b;
    const double s = sign_factor(sys.sign);
    // E as a function of lambda = sqrt(xi1)
    const auto energy_of = [&](double lambda) {
        return s * sys.hbar * sys.hbar / (2.0 * sys.mass) * (sys.alpha * sys.alpha * lambda * lambda - q * q);
    };
    const double root_xi3 = b / sys.alpha;
    const double xi2 = 2.0 * b * q / (sys.alpha * sys.alpha);
    const double lambda_max = 2.0 * std::fabs((2.0 * n + 1.0) * root_xi3 + xi2) / (2.0 * root_xi3) + 1.0;
    const double lambda_min = 1e-12 * lambda_max;
    double lo = energy_of(lambda_min);
    double hi = energy_of(lambda_max);
    if (lo > hi) std::swap(lo, hi);
    const auto coeff = [&](double e) { return reduce(sys, e); };
    // guard against xi1 dipping below zero by rounding at the lambda_min end
    const auto residual = [&](double e, NuBranch br) {
        auto c = coeff(e);
        if (c.x3 < 0.0) c.x3 = 0.0;
        return eigenvalue_residual(c, n, br);
    };
    for (NuBranch br : {NuBranch::KMinus, NuBranch::KPlus}) {
        const double r_lo = residual(lo, br);
        const double r_hi = residual(hi, br);
        if (std::signbit(r_lo) == std::signbit(r_hi)) continue;
        const auto root = find_root([&](double e) { return residual(e, br); }, lo, hi, 1e-12 * std::fabs(p.c0));
        return root.x;
    }
    throw std::domain_error("nu_energy: no quantization root found for n = " + std::to_string(n));
}

/// phi_n(x) on the grid, normalized so that the trapezoidal integral of
/// phi^2 over the grid is 1. The exponent on s must be positive.
inline std::vector<double> normalized_wavefunction(const PhysicalSystem& sys, int n,
                                                   const std::vector<double>& x_grid) {
    if (x_grid.size() < 3) throw std::invalid_argument("normalized_wavefunction: grid needs at least 3 points");
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        if (!(x_grid[i] > x_grid[i - 1])) throw std::invalid_argument("normalized_wavefunction: grid must be strictly increasing");

    const double e = energy_level(sys, n).e_plane;
    const auto c = reduce(sys, e);
    if (!(c.x3 > 0.0))
        throw std::domain_error("normalized_wavefunction: non-normalizable exponent (xi1 = " + std::to_string(c.x3) +
                                " <= 0) for n = " + std::to_string(n));
    const auto d = derive_parameters(c);
    const double r_minus = std::fabs(eigenvalue_residual(c, n, NuBranch::KMinus));
    const double r_plus = std::fabs(eigenvalue_residual(c, n, NuBranch::KPlus));
    const NuBranch branch = r_minus <= r_plus ? NuBranch::KMinus : NuBranch::KPlus;
    const auto form = wavefunction_descriptor(c, d, n, branch);
    if (!(form.power > 0.0))
        throw std::domain_error("normalized_wavefunction: non-normalizable exponent (" + std::to_string(form.power) +
                                ") for n = " + std::to_string(n) + "; the state lies beyond the bound spectrum");

    std::vector<double> phi(x_grid.size());
    std::vector<double> log_abs(x_grid.size());
    double log_peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const double log_s = -sys.alpha * x_grid[i];
        const double s = std::exp(log_s);
        const double poly = laguerre(form.degree, form.laguerre_index, form.laguerre_scale * s);
        log_abs[i] = form.power * log_s + form.tail * s + (poly == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(poly)));
        phi[i] = poly < 0.0 ? -1.0 : 1.0;
        log_peak = std::fmax(log_peak, log_abs[i]);
    }
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= std::exp(log_abs[i] - log_peak);

    double norm = 0.0;
    for (std::size_t i = 1; i < phi.size(); ++i)
        norm += 0.5 * (x_grid[i] - x_grid[i - 1]) * (phi[i] * phi[i] + phi[i - 1] * phi[i - 1]);

    // exponential tail beyond each end, from the local log-slope of phi^2
    const auto tail = [&](std::size_t edge, std::size_t inner) {
        const double p_edge = phi[edge] * phi[edge];
        if (p_edge == 0.0) return 0.0;
        const double p_inner = phi[inner] * phi[inner];
        const double dx = std::fabs(x_grid[edge] - x_grid[inner]);
        const double decay = (std::log(p_inner) - std::log(p_edge)) / dx;
        if (!(decay > 0.0) || p_inner == 0.0) return std::numeric_limits<double>::infinity();
        return p_edge / decay;
    };
    const std::size_t last = phi.size() - 1;
    const double tail_mass = tail(0, 1) + tail(last, last - 1);
    if (!(tail_mass <= 1e-8 * norm))
        throw std::domain_error("normalized_wavefunction: grid does not cover the support (relative tail mass " +
                                std::to_string(tail_mass / norm) + " > 1e-8)");

    const double scale = 1.0 / std::sqrt(norm);
    for (double& v : phi) v *= scale;
    return phi;
}

}  // namespace nbt
