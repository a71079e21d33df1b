#pragma once

// Thermodynamics from ln Q.
//
// Standard mode (textbook definitions, the default):
//   U = -d lnQ/d beta,  C = dU/dT,  F = -kT lnQ,  S = k lnQ + U/T,
//   M = -dF/dB0,        chi = -d^2F/dB0^2
// Literal mode reproduces the printed variants:
//   U = Lambda1/Lambda2,  C = -dU/d beta,  S = kT lnQ - k beta d lnQ/d beta,
//   chi = -Lambda3/Lambda4 + (Lambda5/Lambda6)^2
// F and M are the same in both modes.
//
// Derivatives act on r = lnQ + beta E_ref (see partition.hpp) with the
// reference point and the cutoff held fixed, which keeps the differenced
// function O(1) and makes every quantity exactly covariant under a constant
// level shift.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nbt/derivative.hpp"
#include "nbt/literal.hpp"
#include "nbt/partition.hpp"
#include "nbt/spectrum.hpp"

namespace nbt {

enum class Mode { Standard, Literal };

inline std::string_view to_string(Mode m) { return m == Mode::Standard ? "standard" : "paper"; }

/// A system together with the cutoff and partition method used for it.
/// level_shift adds a constant to every level.
struct Ensemble {
    PhysicalSystem system;
    int n_cutoff = 1;
    QMethod method = QMethod::ErfiClosed;
    double level_shift = 0.0;
};

struct ThermoPoint {
    double temperature;
    double beta;
    double u;
    double c_heat;
    double f;
    double s;
    double m;
    double chi;
    Mode mode;
    QMethod q_method;
    bool fallback = false;
    std::string error;  ///< empty when the point evaluated cleanly

    bool ok() const { return error.empty(); }
};

namespace detail {

struct ReferenceFrame {
    LevelModel model;
    double x_ref;
    double e_ref;
};

inline ReferenceFrame reference_frame(const Ensemble& ens) {
    if (ens.n_cutoff < 0) throw std::invalid_argument("ensemble: cutoff must be non-negative");
    ReferenceFrame fr{level_model(ens.system, ens.level_shift), 0.0, 0.0};
    fr.x_ref = reference_point(fr.model, ens.n_cutoff, ens.method);
    fr.e_ref = fr.model.energy(fr.x_ref);
    return fr;
}

// largest |E(x) - E(x_ref)| over the retained range
inline double energy_spread(const ReferenceFrame& fr, int n_cutoff, QMethod method) {
    const double upper = method == QMethod::ExactSum ? n_cutoff : n_cutoff + 1.0;
    const double v = std::clamp(fr.model.vertex(), 0.0, upper);
    return std::max({std::fabs(fr.model.relative(0.0, fr.x_ref)), std::fabs(fr.model.relative(upper, fr.x_ref)),
                     std::fabs(fr.model.relative(v, fr.x_ref))});
}

inline double beta_step(const ReferenceFrame& fr, const Ensemble& ens, double beta) {
    const double spread = energy_spread(fr, ens.n_cutoff, ens.method);
    double h = 0.1 * beta;
    if (spread > 0.0) h = std::min(h, 0.5 / spread);
    return h;
}

inline double field_step(const Ensemble& ens, double beta) {
    const auto p = spectrum_params(ens.system);
    // every relative level moves by at most c0 |dC1/dB0| (N+1) per unit field
    const double g = p.c0 * std::fabs(c1_field_slope(ens.system)) * (ens.n_cutoff + 1.0);
    double h = 0.1 * std::max(1.0, std::fabs(ens.system.b0));
    if (g > 0.0) h = std::min(h, 0.2 / (beta * g));
    return h;
}

inline void check_temperature(double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("temperature must be positive and finite (got " + std::to_string(t) + ")");
}

// Exact-sum moments in the reference frame: mean and variance of E - E_ref.
struct Moments {
    double mean;
    double variance;
};

inline Moments exact_moments(const ReferenceFrame& fr, double beta, int n_cutoff) {
    std::vector<double> rel(static_cast<std::size_t>(n_cutoff) + 1);
    double lowest = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= n_cutoff; ++n) {
        rel[n] = fr.model.relative(n, fr.x_ref);
        lowest = std::min(lowest, rel[n]);
    }
    double z = 0.0, m1 = 0.0;
    std::vector<double> w(rel.size());
    for (std::size_t i = 0; i < rel.size(); ++i) {
        w[i] = std::exp(-beta * (rel[i] - lowest));
        z += w[i];
        m1 += w[i] * rel[i];
    }
    const double mean = m1 / z;
    double var = 0.0;
    for (std::size_t i = 0; i < rel.size(); ++i) var += w[i] * (rel[i] - mean) * (rel[i] - mean);
    return {mean, var / z};
}

}  // namespace detail

/// Evaluates one ensemble at many temperatures; caches the reference frame.
class Thermodynamics {
public:
    explicit Thermodynamics(Ensemble ens) : ens_(std::move(ens)), frame_(detail::reference_frame(ens_)) {}

    const Ensemble& ensemble() const { return ens_; }
    double reference_energy() const { return frame_.e_ref; }

    /// lnQ + beta E_ref
    double reduced(double beta) const {
        return reduced_log_q(frame_.model, beta, ens_.n_cutoff, ens_.method, frame_.x_ref).value;
    }

    bool used_fallback(double beta) const {
        return reduced_log_q(frame_.model, beta, ens_.n_cutoff, ens_.method, frame_.x_ref).fallback;
    }

    double ln_q(double beta) const { return reduced(beta) - beta * frame_.e_ref; }

    /// U - E_ref = -dr/d beta by finite differences, for any method.
    DerivativeEstimate excess_energy_numeric(double beta) const {
        const auto d = derivative([&](double b) { return reduced(b); }, beta, detail::beta_step(frame_, ens_, beta));
        return {-d.value, d.error};
    }

    /// U - E_ref; exact moments for the exact sum, finite differences otherwise.
    double excess_energy(double beta) const {
        if (ens_.method == QMethod::ExactSum) return detail::exact_moments(frame_, beta, ens_.n_cutoff).mean;
        return excess_energy_numeric(beta).value;
    }

    double mean_energy_numeric(double beta) const { return frame_.e_ref + excess_energy_numeric(beta).value; }
    double mean_energy(double beta) const { return frame_.e_ref + excess_energy(beta); }

    /// d^2 r / d beta^2 = variance of the level distribution.
    double energy_variance(double beta) const {
        if (ens_.method == QMethod::ExactSum) return detail::exact_moments(frame_, beta, ens_.n_cutoff).variance;
        return second_derivative([&](double b) { return reduced(b); }, beta, detail::beta_step(frame_, ens_, beta))
            .value;
    }

    double specific_heat(double beta, Mode mode) const {
        const double kB = ens_.system.kB;
        if (mode == Mode::Standard) return kB * beta * beta * energy_variance(beta);
        const auto u_lit = [&](double b) { return literal_mean_energy(lambda_set(ens_.system, b, ens_.n_cutoff)).value(); };
        return -derivative(u_lit, beta, detail::beta_step(frame_, ens_, beta)).value;
    }

    double free_energy(double beta) const { return frame_.e_ref - reduced(beta) / beta; }

    double entropy(double beta, Mode mode) const {
        const double kB = ens_.system.kB;
        if (mode == Mode::Standard) return kB * (reduced(beta) + beta * excess_energy(beta));
        const double t = 1.0 / (kB * beta);
        return kB * t * ln_q(beta) + kB * beta * mean_energy(beta);
    }

    /// -dF/dB0 = -dE_ref/dB0 + (1/beta) dr/dB0
    double magnetization(double beta) const {
        const double de_ref = frame_.model.c1_slope(frame_.x_ref) * c1_field_slope(ens_.system);
        const auto d = derivative([&](double b) { return reduced_at_field(b, beta); }, ens_.system.b0,
                                  detail::field_step(ens_, beta));
        return -de_ref + d.value / beta;
    }

    /// Standard: -d^2F/dB0^2 = (1/beta) d^2 r/dB0^2 (E_ref is linear in B0).
    double susceptibility(double beta, Mode mode) const {
        if (mode == Mode::Literal) return literal_susceptibility(lambda_set(ens_.system, beta, ens_.n_cutoff)).value();
        if (c1_field_slope(ens_.system) == 0.0) return 0.0;
        const auto d = second_derivative([&](double b) { return reduced_at_field(b, beta); }, ens_.system.b0,
                                         detail::field_step(ens_, beta));
        return d.value / beta;
    }

    ThermoPoint point(double temperature, Mode mode) const {
        detail::check_temperature(temperature);
        const double beta = 1.0 / (ens_.system.kB * temperature);
        ThermoPoint p{temperature, beta, 0, 0, 0, 0, 0, 0, mode, ens_.method, false, {}};
        const double r = reduced(beta);
        p.fallback = used_fallback(beta);
        p.f = frame_.e_ref - r / beta;
        p.m = magnetization(beta);
        if (mode == Mode::Standard) {
            const double excess = excess_energy(beta);
            p.u = frame_.e_ref + excess;
            p.s = ens_.system.kB * (r + beta * excess);
            p.c_heat = specific_heat(beta, mode);
            p.chi = susceptibility(beta, mode);
        } else {
            const auto lam = lambda_set(ens_.system, beta, ens_.n_cutoff);
            p.u = literal_mean_energy(lam).value();
            p.s = entropy(beta, mode);
            p.c_heat = specific_heat(beta, mode);
            p.chi = literal_susceptibility(lam).value();
        }
        return p;
    }

private:
    double reduced_at_field(double b0, double beta) const {
        PhysicalSystem sys = ens_.system;
        sys.b0 = b0;
        return reduced_log_q(level_model(sys, ens_.level_shift), beta, ens_.n_cutoff, ens_.method, frame_.x_ref).value;
    }

    Ensemble ens_;
    detail::ReferenceFrame frame_;
};

// Free-function surface; each builds a Thermodynamics for a single call.

inline double ln_q(const Ensemble& ens, double beta) { return Thermodynamics(ens).ln_q(beta); }

inline double mean_energy_numeric(const Ensemble& ens, double beta) {
    return Thermodynamics(ens).mean_energy_numeric(beta);
}

/// Lambda1 / Lambda2 as printed.
inline double mean_energy_analytic(const PhysicalSystem& sys, double beta, int n_cutoff) {
    return literal_mean_energy(lambda_set(sys, beta, n_cutoff)).value();
}

inline double specific_heat(const Ensemble& ens, double beta, Mode mode = Mode::Standard) {
    return Thermodynamics(ens).specific_heat(beta, mode);
}

inline double free_energy(const Ensemble& ens, double temperature) {
    detail::check_temperature(temperature);
    return Thermodynamics(ens).free_energy(1.0 / (ens.system.kB * temperature));
}

inline double entropy(const Ensemble& ens, double temperature, Mode mode = Mode::Standard) {
    detail::check_temperature(temperature);
    return Thermodynamics(ens).entropy(1.0 / (ens.system.kB * temperature), mode);
}

inline double magnetization(const Ensemble& ens, double temperature) {
    detail::check_temperature(temperature);
    return Thermodynamics(ens).magnetization(1.0 / (ens.system.kB * temperature));
}

inline double susceptibility(const Ensemble& ens, double temperature, Mode mode = Mode::Standard) {
    detail::check_temperature(temperature);
    return Thermodynamics(ens).susceptibility(1.0 / (ens.system.kB * temperature), mode);
}

/// |T S - (U - F)| relative to the largest of the three magnitudes.
inline double identity_defect(const ThermoPoint& p) {
    const double ts = p.temperature * p.s;
    const double scale = std::max({std::fabs(p.u), std::fabs(p.f), std::fabs(ts)});
    return scale == 0.0 ? 0.0 : std::fabs(ts - (p.u - p.f)) / scale;
}

/// One point per temperature. A failing point keeps its slot with NaN values
/// and the message in `error`; in Standard mode a point that violates
/// F = U - TS beyond 1e-8 is reported the same way.
inline std::vector<ThermoPoint> sweep(const Ensemble& ens, const std::vector<double>& t_grid, Mode mode) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        detail::check_temperature(t_grid[i]);
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("sweep: temperature grid must be strictly increasing");
    }
    const Thermodynamics th(ens);
    std::vector<ThermoPoint> out;
    out.reserve(t_grid.size());
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (double t : t_grid) {
        try {
            ThermoPoint p = th.point(t, mode);
            if (mode == Mode::Standard && !(identity_defect(p) <= 1e-8))
                p.error = "thermodynamic identity F = U - TS violated (defect " + std::to_string(identity_defect(p)) + ")";
            out.push_back(std::move(p));
        } catch (const std::exception& e) {
            out.push_back({t, 1.0 / (ens.system.kB * t), nan, nan, nan, nan, nan, nan, mode, ens.method, false, e.what()});
        }
    }
    return out;
}

}  // namespace nbt
