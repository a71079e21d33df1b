#pragma once

// Files written by the driver: one CSV per swept value (plus an errors
// sidecar when some points failed), an optional audit CSV per value, an
// optional gnuplot script, and manifest.jsonl hashing all of them.

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbt/cli/config.hpp"
#include "nbt/cli/run.hpp"
#include "nbt/literal.hpp"

namespace nbt::cli {

namespace fs = std::filesystem;

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* csv_header = "T,beta,U,C,F,S,M,chi,mode,q_method";

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

/// "fig2_b0_2.5.csv", or "<name>.csv" without a sweep.
inline std::string series_stem(const RunConfig& cfg, const Series& s) {
    if (s.param == SweepParam::None) return cfg.name;
    return cfg.name + "_" + std::string(to_string(s.param)) + "_" + format_label(s.value);
}

inline std::string series_csv(const std::vector<ThermoPoint>& points) {
    std::ostringstream os;
    os << csv_header << '\n';
    for (const auto& p : points) {
        os << format_number(p.temperature) << ',' << format_number(p.beta) << ',' << format_number(p.u) << ','
           << format_number(p.c_heat) << ',' << format_number(p.f) << ',' << format_number(p.s) << ','
           << format_number(p.m) << ',' << format_number(p.chi) << ',' << to_string(p.mode) << ','
           << to_string(p.q_method) << '\n';
    }
    return os.str();
}

inline std::string csv_quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += "\"\"";
        else if (c == '\n') out += ' ';
        else out += c;
    }
    return out + "\"";
}

/// One row per failed point: T, error message.
inline std::string errors_csv(const std::vector<ThermoPoint>& points) {
    std::ostringstream os;
    os << "T,error\n";
    for (const auto& p : points)
        if (!p.ok()) os << format_number(p.temperature) << ',' << csv_quote(p.error) << '\n';
    return os.str();
}

/// Parsed numeric table of a CSV produced by series_csv.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> numbers;  ///< T .. chi
    std::vector<std::string> mode, q_method;
};

inline CsvTable parse_series_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != csv_header) throw OutputError("CSV header mismatch");
    t.header = split(line, ',');
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 10) throw OutputError("CSV row has " + std::to_string(cells.size()) + " cells");
        std::vector<double> row;
        for (int i = 0; i < 8; ++i) row.push_back(std::strtod(cells[i].c_str(), nullptr));
        t.numbers.push_back(std::move(row));
        t.mode.push_back(cells[8]);
        t.q_method.push_back(cells[9]);
    }
    return t;
}

// ---------------------------------------------------------------- audit

struct AuditRow {
    double temperature;
    double beta;
    std::string quantity;
    double standard_value;
    double literal_value;
    double rel_dev;
};

/// Standard vs literal U, C, S and chi at every temperature. The literal
/// numbers are whatever the printed expressions give; no agreement expected.
inline std::vector<AuditRow> audit_rows(const Ensemble& ens, const std::vector<double>& temps) {
    const Thermodynamics th(ens);
    std::vector<AuditRow> rows;
    for (double t : temps) {
        const auto st = th.point(t, Mode::Standard);
        const auto lit = th.point(t, Mode::Literal);
        const auto add = [&](const char* q, double a, double b) {
            rows.push_back({t, st.beta, q, a, b, std::fabs(b - a) / std::fabs(a)});
        };
        add("U", st.u, lit.u);
        add("C", st.c_heat, lit.c_heat);
        add("S", st.s, lit.s);
        add("chi", st.chi, lit.chi);
    }
    return rows;
}

inline std::string audit_csv(const std::vector<AuditRow>& rows) {
    std::ostringstream os;
    os << "T,beta,quantity,standard_value,paper_literal_value,rel_dev\n";
    for (const auto& r : rows)
        os << format_number(r.temperature) << ',' << format_number(r.beta) << ',' << r.quantity << ','
           << format_number(r.standard_value) << ',' << format_number(r.literal_value) << ','
           << format_number(r.rel_dev) << '\n';
    return os.str();
}

// ---------------------------------------------------------------- plot script

inline std::string series_title(const Series& s) {
    if (s.param == SweepParam::B0) return "B0 = " + format_label(s.value);
    if (s.param == SweepParam::Alpha) return "alpha = " + format_label(s.value);
    return "";
}

/// gnuplot script drawing cfg.quantity against T, one series per CSV.
inline std::string plot_script(const RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& csv_titles) {
    std::ostringstream os;
    os << "# " << cfg.name << ": " << axis_label(cfg.quantity) << " vs temperature\n";
    os << "set datafile separator ','\n";
    os << "set xlabel 'Temperature'\n";
    os << "set ylabel '" << axis_label(cfg.quantity) << "'\n";
    if (cfg.t_log) os << "set logscale x\n";
    os << "set key best\n";
    if (csv_titles.empty()) {
        os << "# warning: empty sweep, no series to plot\n";
        return os.str();
    }
    const int col = csv_column(cfg.quantity);
    os << "plot";
    for (std::size_t i = 0; i < csv_titles.size(); ++i) {
        os << (i ? ", \\\n    " : " ") << "'" << csv_titles[i].first << "' skip 1 using 1:" << col
           << " with lines title '" << csv_titles[i].second << "'";
    }
    os << '\n';
    return os.str();
}

// ---------------------------------------------------------------- files and manifest

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw OutputError("sha256: cannot allocate digest context");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw OutputError("sha256: digest failed");
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

inline void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open '" + path.string() + "' for writing");
    out << bytes;
    out.close();
    if (!out) throw OutputError("write failed for '" + path.string() + "'");
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw OutputError("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Artifact {
    std::string path;  ///< relative to the output directory
    std::string sha256;
};

struct EmittedFiles {
    std::vector<Artifact> artifacts;
    std::vector<std::pair<std::string, std::string>> csv_titles;  ///< plotted CSVs and their legend
};

/// CSV per series (+ errors sidecar, + audit when requested).
inline EmittedFiles emit_csv(const SweepOutput& out, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw OutputError("cannot create output directory '" + dir.string() + "': " + ec.message());
    EmittedFiles files;
    const auto put = [&](const std::string& name, const std::string& bytes) {
        write_file(dir / name, bytes);
        files.artifacts.push_back({name, sha256_hex(bytes)});
    };
    for (const auto& s : out.series) {
        const std::string stem = series_stem(out.config, s);
        put(stem + ".csv", series_csv(s.points));
        files.csv_titles.emplace_back(stem + ".csv", series_title(s));
        bool any_error = false;
        for (const auto& p : s.points) any_error |= !p.ok();
        if (any_error) put(stem + ".errors.csv", errors_csv(s.points));
        if (out.config.audit && s.error.empty())
            put(stem + ".audit.csv", audit_csv(audit_rows(Ensemble{s.system, s.n_cutoff, out.config.method, 0.0},
                                                          out.config.temperatures())));
    }
    return files;
}

inline Artifact emit_plot_script(const RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& csv_titles,
                                 const fs::path& dir) {
    for (const auto& [csv, title] : csv_titles)
        if (!fs::exists(dir / csv)) throw OutputError("plot script would reference missing file '" + csv + "'");
    const std::string name = cfg.name + ".gp";
    const std::string bytes = plot_script(cfg, csv_titles);
    write_file(dir / name, bytes);
    return {name, sha256_hex(bytes)};
}

/// manifest.jsonl: one {"path", "sha256", "config"} object per artifact.
inline void write_manifest(const RunConfig& cfg, const std::vector<Artifact>& artifacts, const fs::path& dir) {
    std::ostringstream os;
    const json config = to_json(cfg);
    for (const auto& a : artifacts) {
        json line{{"path", a.path}, {"sha256", a.sha256}, {"config", config}};
        os << line.dump() << '\n';
    }
    write_file(dir / "manifest.jsonl", os.str());
}

/// Everything a run produces; returns the artifact list (manifest excluded).
inline std::vector<Artifact> emit_all(const SweepOutput& out) {
    const fs::path dir = out.config.output_dir;
    auto files = emit_csv(out, dir);
    if (out.config.emit_plots) files.artifacts.push_back(emit_plot_script(out.config, files.csv_titles, dir));
    write_manifest(out.config, files.artifacts, dir);
    return files.artifacts;
}

}  // namespace nbt::cli
