#pragma once

// Run configuration for the command-line driver: defaults, figure presets,
// JSON config files and flags, applied in that order (a preset replaces the
// defaults, file keys override the preset, flags override everything).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbt/partition.hpp"
#include "nbt/spectrum.hpp"
#include "nbt/thermo.hpp"

namespace nbt::cli {

using json = nlohmann::json;

class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class SweepParam { None, B0, Alpha };

struct SweepSpec {
    SweepParam param = SweepParam::None;
    std::vector<double> values;
};

/// Column plotted by the generated script.
enum class Quantity { U, C, F, S, M, Chi };

struct RunConfig {
    PhysicalSystem system;
    double t_min = 0.01;
    double t_max = 10.0;
    int t_steps = 200;
    bool t_log = true;
    SweepSpec sweep;
    QMethod method = QMethod::ErfiClosed;
    Mode mode = Mode::Standard;
    CutoffPolicy cutoff = CutoffPolicy::vertex();
    std::string output_dir = "out";
    bool emit_plots = false;
    bool audit = false;
    Quantity quantity = Quantity::C;
    std::string name = "run";  ///< file stem; the preset id when one is used

    void validate() const;
    std::vector<double> temperatures() const;
};

inline std::string_view to_string(SweepParam p) {
    switch (p) {
        case SweepParam::None: return "none";
        case SweepParam::B0: return "b0";
        case SweepParam::Alpha: return "alpha";
    }
    return "?";
}

inline std::string_view to_string(Quantity q) {
    switch (q) {
        case Quantity::U: return "U";
        case Quantity::C: return "C";
        case Quantity::F: return "F";
        case Quantity::S: return "S";
        case Quantity::M: return "M";
        case Quantity::Chi: return "chi";
    }
    return "?";
}

/// 1-based CSV column index of a quantity (T = 1, beta = 2).
inline int csv_column(Quantity q) { return 3 + static_cast<int>(q); }

inline std::string_view axis_label(Quantity q) {
    switch (q) {
        case Quantity::U: return "Mean energy";
        case Quantity::C: return "Specific heat";
        case Quantity::F: return "Free energy";
        case Quantity::S: return "Entropy";
        case Quantity::M: return "Magnetization";
        case Quantity::Chi: return "Magnetic susceptibility";
    }
    return "?";
}

inline void RunConfig::validate() const {
    const auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(field, "must be a positive finite number");
    };
    positive(t_min, "t_min");
    positive(t_max, "t_max");
    if (!(t_min < t_max)) throw UsageError("t_range", "t_min must be smaller than t_max");
    if (t_steps < 1) throw UsageError("t_steps", "must be at least 1");
    try {
        system.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError("system", e.what());
    }
    if (sweep.param != SweepParam::None) {
        if (sweep.values.empty()) throw UsageError("sweep", "value list must not be empty");
        for (double v : sweep.values) {
            if (!std::isfinite(v)) throw UsageError("sweep", "values must be finite");
            if (sweep.param == SweepParam::Alpha && !(v > 0.0)) throw UsageError("alpha", "must be > 0");
        }
    }
}

/// t_steps points from t_min to t_max inclusive, log- or linearly spaced.
/// A single step yields just t_min.
inline std::vector<double> RunConfig::temperatures() const {
    std::vector<double> t(static_cast<std::size_t>(t_steps));
    if (t_steps == 1) return {t_min};
    for (int i = 0; i < t_steps; ++i) {
        const double f = static_cast<double>(i) / (t_steps - 1);
        t[i] = t_log ? t_min * std::pow(t_max / t_min, f) : t_min + (t_max - t_min) * f;
    }
    t.front() = t_min;
    t.back() = t_max;
    return t;
}

// ---------------------------------------------------------------- presets

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
    return names;
}

/// Figures 1-3 sweep B0 at alpha = 1, ky = 0.1; figures 4-7 sweep alpha at
/// B0 = 2.5, ky = 0.1. The sweep values and the temperature window are our
/// choice; the captions do not give them.
inline RunConfig preset(const std::string& id) {
    RunConfig cfg;
    cfg.name = id;
    cfg.system.ky = 0.1;
    cfg.emit_plots = true;
    cfg.t_min = 0.01;
    cfg.t_max = 10.0;
    cfg.t_steps = 200;
    cfg.t_log = true;
    cfg.method = QMethod::ErfiClosed;
    cfg.mode = Mode::Standard;
    cfg.cutoff = CutoffPolicy::vertex();
    if (id == "fig1" || id == "fig2" || id == "fig3") {
        cfg.system.alpha = 1.0;
        cfg.system.b0 = 2.5;
        cfg.sweep = {SweepParam::B0, {1.0, 2.5, 5.0}};
        cfg.quantity = id == "fig1" ? Quantity::U : id == "fig2" ? Quantity::C : Quantity::Chi;
    } else if (id == "fig4" || id == "fig5" || id == "fig6" || id == "fig7") {
        cfg.system.alpha = 1.0;
        cfg.system.b0 = 2.5;
        cfg.sweep = {SweepParam::Alpha, {0.5, 1.0, 1.5}};
        cfg.quantity = id == "fig4"   ? Quantity::F
                       : id == "fig5" ? Quantity::S
                       : id == "fig6" ? Quantity::C
                                      : Quantity::Chi;
    } else {
        throw UsageError("preset", "unknown preset '" + id + "' (expected fig1..fig7)");
    }
    return cfg;
}

// ---------------------------------------------------------------- parsing helpers

inline double parse_number(const std::string& text, const std::string& field) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError(field, "malformed number '" + text + "'");
    }
    if (used != text.size()) throw UsageError(field, "malformed number '" + text + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

/// MIN:MAX:STEPS with an optional fourth field "log" or "lin".
inline void apply_t_range(RunConfig& cfg, const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3 && parts.size() != 4) throw UsageError("t_range", "expected MIN:MAX:STEPS[:log|lin]");
    cfg.t_min = parse_number(parts[0], "t_min");
    cfg.t_max = parse_number(parts[1], "t_max");
    const double steps = parse_number(parts[2], "t_steps");
    if (steps != std::floor(steps) || steps < 1 || steps > 1e7) throw UsageError("t_steps", "must be a positive integer");
    cfg.t_steps = static_cast<int>(steps);
    cfg.t_log = false;
    if (parts.size() == 4) {
        if (parts[3] == "log") cfg.t_log = true;
        else if (parts[3] != "lin") throw UsageError("t_range", "spacing must be 'log' or 'lin'");
    }
}

inline CutoffPolicy parse_cutoff(const std::string& text) {
    if (text == "vertex") return CutoffPolicy::vertex();
    const double n = parse_number(text, "cutoff");
    if (n != std::floor(n) || n < 0 || n > 1e6) throw UsageError("cutoff", "must be 'vertex' or a non-negative integer");
    return CutoffPolicy::explicit_n(static_cast<int>(n));
}

inline QMethod parse_method(const std::string& text) {
    if (text == "exact") return QMethod::ExactSum;
    if (text == "poisson") return QMethod::PoissonQuadrature;
    if (text == "closed") return QMethod::ErfiClosed;
    throw UsageError("method", "expected exact, poisson or closed (got '" + text + "')");
}

inline Mode parse_mode(const std::string& text) {
    if (text == "standard") return Mode::Standard;
    if (text == "paper") return Mode::Literal;
    throw UsageError("mode", "expected standard or paper (got '" + text + "')");
}

inline Quantity parse_quantity(const std::string& text) {
    for (Quantity q : {Quantity::U, Quantity::C, Quantity::F, Quantity::S, Quantity::M, Quantity::Chi})
        if (text == to_string(q)) return q;
    throw UsageError("quantity", "expected one of U, C, F, S, M, chi (got '" + text + "')");
}

inline EnergySign parse_sign(const std::string& text) {
    if (text == "physical") return EnergySign::Physical;
    if (text == "mirrored") return EnergySign::Mirrored;
    throw UsageError("sign", "expected physical or mirrored (got '" + text + "')");
}

inline std::vector<double> parse_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) out.push_back(parse_number(part, field));
    if (out.empty()) throw UsageError(field, "value list must not be empty");
    return out;
}

// ---------------------------------------------------------------- JSON form

inline json to_json(const RunConfig& cfg) {
    const auto& s = cfg.system;
    json j;
    j["name"] = cfg.name;
    j["mass"] = s.mass;
    j["charge"] = s.charge;
    j["b0"] = s.b0;
    j["alpha"] = s.alpha;
    j["ky"] = s.ky;
    j["kz"] = s.kz;
    j["hbar"] = s.hbar;
    j["c_light"] = s.c_light;
    j["kB"] = s.kB;
    j["sign"] = s.sign == EnergySign::Physical ? "physical" : "mirrored";
    j["t_min"] = cfg.t_min;
    j["t_max"] = cfg.t_max;
    j["t_steps"] = cfg.t_steps;
    j["t_log"] = cfg.t_log;
    j["sweep"] = {{"param", std::string(to_string(cfg.sweep.param))}, {"values", cfg.sweep.values}};
    j["method"] = std::string(to_string(cfg.method));
    j["mode"] = std::string(to_string(cfg.mode));
    if (cfg.cutoff.kind == CutoffPolicy::Kind::Vertex) j["cutoff"] = "vertex";
    else j["cutoff"] = cfg.cutoff.n;
    j["out"] = cfg.output_dir;
    j["plots"] = cfg.emit_plots;
    j["audit"] = cfg.audit;
    j["quantity"] = std::string(to_string(cfg.quantity));
    return j;
}

/// Overlay the keys of a config object on cfg. Unknown keys are rejected.
/// "preset" is handled by the caller, before anything else is applied.
inline void apply_json(RunConfig& cfg, const json& j) {
    if (!j.is_object()) throw UsageError("config", "top level must be a JSON object");
    const auto number = [](const json& v, const std::string& key) {
        if (!v.is_number()) throw UsageError(key, "must be a number");
        return v.get<double>();
    };
    const auto text = [](const json& v, const std::string& key) {
        if (!v.is_string()) throw UsageError(key, "must be a string");
        return v.get<std::string>();
    };
    const auto boolean = [](const json& v, const std::string& key) {
        if (!v.is_boolean()) throw UsageError(key, "must be true or false");
        return v.get<bool>();
    };
    auto& s = cfg.system;
    for (const auto& [key, v] : j.items()) {
        if (key == "preset") continue;
        if (key == "name") cfg.name = text(v, key);
        else if (key == "mass") s.mass = number(v, key);
        else if (key == "charge") s.charge = number(v, key);
        else if (key == "b0") s.b0 = number(v, key);
        else if (key == "alpha") s.alpha = number(v, key);
        else if (key == "ky") s.ky = number(v, key);
        else if (key == "kz") s.kz = number(v, key);
        else if (key == "hbar") s.hbar = number(v, key);
        else if (key == "c_light") s.c_light = number(v, key);
        else if (key == "kB") s.kB = number(v, key);
        else if (key == "sign") s.sign = parse_sign(text(v, key));
        else if (key == "t_min") cfg.t_min = number(v, key);
        else if (key == "t_max") cfg.t_max = number(v, key);
        else if (key == "t_steps") {
            const double n = number(v, key);
            if (n != std::floor(n) || n < 1 || n > 1e7) throw UsageError(key, "must be a positive integer");
            cfg.t_steps = static_cast<int>(n);
        } else if (key == "t_log") cfg.t_log = boolean(v, key);
        else if (key == "sweep") {
            if (!v.is_object()) throw UsageError(key, "must be an object with 'param' and 'values'");
            SweepSpec sw;
            for (const auto& [k2, v2] : v.items()) {
                if (k2 == "param") {
                    const auto p = text(v2, "sweep.param");
                    if (p == "none") sw.param = SweepParam::None;
                    else if (p == "b0") sw.param = SweepParam::B0;
                    else if (p == "alpha") sw.param = SweepParam::Alpha;
                    else throw UsageError("sweep.param", "expected none, b0 or alpha");
                } else if (k2 == "values") {
                    if (!v2.is_array()) throw UsageError("sweep.values", "must be an array of numbers");
                    for (const auto& x : v2) sw.values.push_back(number(x, "sweep.values"));
                } else {
                    throw UsageError("sweep." + k2, "unknown key");
                }
            }
            cfg.sweep = sw;
        } else if (key == "method") cfg.method = parse_method(text(v, key));
        else if (key == "mode") cfg.mode = parse_mode(text(v, key));
        else if (key == "cutoff") {
            if (v.is_string()) cfg.cutoff = parse_cutoff(v.get<std::string>());
            else cfg.cutoff = parse_cutoff(std::to_string(static_cast<long long>(number(v, key))));
        } else if (key == "out") cfg.output_dir = text(v, key);
        else if (key == "plots") cfg.emit_plots = boolean(v, key);
        else if (key == "audit") cfg.audit = boolean(v, key);
        else if (key == "quantity") cfg.quantity = parse_quantity(text(v, key));
        else throw UsageError(key, "unknown config key");
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config", "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config", "'" + path + "' is not valid JSON: " + e.what());
    }
}

// ---------------------------------------------------------------- command line

struct ParsedArgs {
    RunConfig config;
    bool help = false;
    std::string help_text;
};

inline ParsedArgs parse_arguments(const std::vector<std::string>& args) {
    CLI::App app{"Thermodynamics of a charged particle in an exponentially decaying magnetic field"};
    std::optional<std::string> preset_id, config_file, t_range, cutoff, method, mode, out, quantity, sweep_b0,
        sweep_alpha, sign;
    std::optional<double> b0, alpha, ky, kz;
    bool plots = false, audit = false;
    app.add_option("--preset", preset_id, "figure preset: fig1 .. fig7");
    app.add_option("--config", config_file, "JSON config file (flags override its values)");
    app.add_option("--b0", b0, "field amplitude B0");
    app.add_option("--alpha", alpha, "non-uniformity alpha (> 0)");
    app.add_option("--ky", ky, "wavenumber k_y");
    app.add_option("--kz", kz, "wavenumber k_z");
    app.add_option("--t-range", t_range, "MIN:MAX:STEPS[:log|lin] temperature grid");
    app.add_option("--cutoff", cutoff, "level cutoff: vertex or an integer N");
    app.add_option("--method", method, "partition function: exact, poisson or closed");
    app.add_option("--mode", mode, "standard or paper");
    app.add_option("--out", out, "output directory");
    app.add_flag("--plots", plots, "also write a gnuplot script");
    app.add_flag("--audit", audit, "write the standard-vs-literal audit CSV");
    app.add_option("--quantity", quantity, "plotted quantity: U, C, F, S, M or chi");
    app.add_option("--sweep-b0", sweep_b0, "comma-separated B0 values");
    app.add_option("--sweep-alpha", sweep_alpha, "comma-separated alpha values");
    app.add_option("--sign", sign, "level sign convention: physical or mirrored");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        return {RunConfig{}, true, app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError("arguments", e.what());
    }

    std::optional<json> file;
    if (config_file) file = read_json_file(*config_file);
    if (!preset_id && file && file->is_object() && file->contains("preset")) {
        if (!(*file)["preset"].is_string()) throw UsageError("preset", "must be a string");
        preset_id = (*file)["preset"].get<std::string>();
    }

    RunConfig cfg = preset_id ? preset(*preset_id) : RunConfig{};
    if (file) apply_json(cfg, *file);

    if (b0) cfg.system.b0 = *b0;
    if (alpha) cfg.system.alpha = *alpha;
    if (ky) cfg.system.ky = *ky;
    if (kz) cfg.system.kz = *kz;
    if (t_range) apply_t_range(cfg, *t_range);
    if (cutoff) cfg.cutoff = parse_cutoff(*cutoff);
    if (method) cfg.method = parse_method(*method);
    if (mode) cfg.mode = parse_mode(*mode);
    if (out) cfg.output_dir = *out;
    if (plots) cfg.emit_plots = true;
    if (audit) cfg.audit = true;
    if (quantity) cfg.quantity = parse_quantity(*quantity);
    if (sign) cfg.system.sign = parse_sign(*sign);
    if (sweep_b0 && sweep_alpha) throw UsageError("sweep", "choose one of --sweep-b0 and --sweep-alpha");
    if (sweep_b0) cfg.sweep = {SweepParam::B0, parse_list(*sweep_b0, "sweep_b0")};
    if (sweep_alpha) cfg.sweep = {SweepParam::Alpha, parse_list(*sweep_alpha, "sweep_alpha")};
    // a direct --b0 / --alpha without a sweep list pins a preset's swept parameter
    if ((b0 && cfg.sweep.param == SweepParam::B0 && !sweep_b0) ||
        (alpha && cfg.sweep.param == SweepParam::Alpha && !sweep_alpha))
        cfg.sweep = {};

    if (!(cfg.system.alpha > 0.0)) throw UsageError("alpha", "must be > 0");
    cfg.validate();
    return {cfg, false, {}};
}

/// parse_config(args, file): the file argument behaves like --config.
inline RunConfig parse_config(std::vector<std::string> args, const std::optional<std::string>& file = std::nullopt) {
    if (file) {
        args.push_back("--config");
        args.push_back(*file);
    }
    auto parsed = parse_arguments(args);
    if (parsed.help) throw UsageError("help", parsed.help_text);
    return parsed.config;
}

}  // namespace nbt::cli
