#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nbt/cli/config.hpp"
#include "nbt/thermo.hpp"

namespace nbt::cli {

/// One swept value: the system actually used, its resolved cutoff and the
/// temperature table. `error` is set when the whole series could not be set
/// up (for example no vertex cutoff exists for that value).
struct Series {
    SweepParam param = SweepParam::None;
    double value = 0.0;
    PhysicalSystem system;
    int n_cutoff = -1;
    std::vector<ThermoPoint> points;
    std::string error;
};

struct SweepOutput {
    RunConfig config;
    std::vector<Series> series;

    std::size_t failed_points() const {
        std::size_t n = 0;
        for (const auto& s : series)
            for (const auto& p : s.points) n += p.ok() ? 0 : 1;
        return n;
    }
    std::size_t total_points() const {
        std::size_t n = 0;
        for (const auto& s : series) n += s.points.size();
        return n;
    }
};

/// Worker count: hardware concurrency, capped by NBT_THREADS when set.
inline unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NBT_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Evaluates every (series, temperature) point. Points are independent and
/// may run on several threads; each lands in its own slot so the output
/// never depends on scheduling.
inline SweepOutput run_sweep(const RunConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    SweepOutput out{cfg, {}};
    const auto temps = cfg.temperatures();
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<double> values = cfg.sweep.param == SweepParam::None ? std::vector<double>{0.0} : cfg.sweep.values;
    std::vector<std::optional<Thermodynamics>> models;
    for (double v : values) {
        Series s;
        s.param = cfg.sweep.param;
        s.value = v;
        s.system = cfg.system;
        if (s.param == SweepParam::B0) s.system.b0 = v;
        if (s.param == SweepParam::Alpha) s.system.alpha = v;
        if (s.param == SweepParam::None) s.value = 0.0;
        std::optional<Thermodynamics> model;
        try {
            s.n_cutoff = level_cutoff(s.system, cfg.cutoff);
            model.emplace(Ensemble{s.system, s.n_cutoff, cfg.method, 0.0});
        } catch (const std::exception& e) {
            s.error = e.what();
        }
        s.points.resize(temps.size());
        for (std::size_t i = 0; i < temps.size(); ++i) {
            const double t = temps[i];
            s.points[i] = {t, 1.0 / (s.system.kB * t), nan, nan, nan, nan, nan, nan, cfg.mode, cfg.method, false, s.error};
        }
        out.series.push_back(std::move(s));
        models.push_back(std::move(model));
    }

    const std::size_t per_series = temps.size();
    const std::size_t jobs = per_series * out.series.size();
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < jobs; k = next++) {
            const std::size_t si = k / per_series;
            const std::size_t ti = k % per_series;
            if (!models[si]) continue;
            auto& slot = out.series[si].points[ti];
            try {
                ThermoPoint p = models[si]->point(temps[ti], cfg.mode);
                if (cfg.mode == Mode::Standard && !(identity_defect(p) <= 1e-8))
                    p.error = "thermodynamic identity F = U - TS violated";
                slot = std::move(p);
            } catch (const std::exception& e) {
                slot.error = e.what();
            }
        }
    };
    if (threads == 0) threads = thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace nbt::cli
