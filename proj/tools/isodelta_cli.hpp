#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isodelta/isodelta.hpp"

#ifndef ISODELTA_VERSION
#define ISODELTA_VERSION "0.0.0"
#endif

namespace isodelta::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = ISODELTA_VERSION;

inline const std::vector<double> kFigure1Set{0.00001, 0.10001, 1.10001, 5.10001};
inline const std::vector<double> kFigure3Set{-1.4, -0.9, -0.6, -0.3};

/// Bad flags, bad config values or a parameter the command refuses. Exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    double g = -1.0;
    std::vector<double> C_list = kFigure1Set;
    double x_min = -25.0;
    double x_max = 25.0;
    std::size_t n_points = 5001;
    std::vector<double> k_list{0.5, 1.0, 2.0};
    std::string format = "csv";
    bool allow_singular = false;
    bool normalized = true;
    std::string out;
    bool gnuplot = false;

    Grid grid() const { return Grid(x_min, x_max, n_points); }
};

/// Shortest round-trip representation; NaN becomes `nan`.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string column_name(double C) { return "C=" + format_number(C); }

/// Column-oriented table sharing the x axis of a grid.
struct Table {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    void add(std::string name, std::vector<double> values) {
        names.push_back(std::move(name));
        columns.push_back(std::move(values));
    }
};

inline std::string to_csv(const Table& t) {
    std::string s;
    for (std::size_t c = 0; c < t.names.size(); ++c) s += (c ? "," : "") + t.names[c];
    s += '\n';
    const std::size_t rows = t.columns.empty() ? 0 : t.columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) s += (c ? "," : "") + format_number(t.columns[c][r]);
        s += '\n';
    }
    return s;
}

inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json config_json(const RunConfig& cfg) {
    return {{"g", cfg.g},
            {"C", cfg.C_list},
            {"x_min", cfg.x_min},
            {"x_max", cfg.x_max},
            {"points", cfg.n_points},
            {"k", cfg.k_list},
            {"format", cfg.format},
            {"allow_singular", cfg.allow_singular},
            {"normalized", cfg.normalized}};
}

inline json header_json(const std::string& command, const RunConfig& cfg) {
    const Grid grid = cfg.grid();
    return {{"tool", "isodelta"},
            {"version", kVersion},
            {"command", command},
            {"config", config_json(cfg)},
            {"grid", {{"x_min", grid.x_min()}, {"x_max", grid.x_max()}, {"points", grid.size()}, {"h", grid.spacing()}}}};
}

inline json table_json(const Table& t) {
    json data = json::object();
    for (std::size_t c = 0; c < t.names.size(); ++c) {
        json col = json::array();
        for (double v : t.columns[c]) col.push_back(number(v));
        data[t.names[c]] = std::move(col);
    }
    return data;
}

struct SingularRow {
    double C;
    double x;
    Side half_line;
};

inline Table singularity_table(const std::vector<SingularRow>& rows) {
    Table t;
    std::vector<double> C, x, side;
    for (const auto& r : rows) {
        C.push_back(r.C);
        x.push_back(r.x);
        side.push_back(r.half_line == Side::Right ? 1.0 : -1.0);
    }
    t.add("C", std::move(C));
    t.add("x", std::move(x));
    t.add("half_line", std::move(side));
    return t;
}

inline json singularity_json(const std::vector<SingularRow>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"C", r.C}, {"x", r.x}, {"half_line", r.half_line == Side::Right ? "positive" : "negative"}});
    return out;
}

/// Rendered command output: main body plus an optional singularity sidecar (CSV only).
struct Output {
    std::string body;
    std::string sidecar;
};

// ---------------------------------------------------------------------------
// Validation

inline void validate(const RunConfig& cfg) {
    if (!(cfg.g < 0.0) || !std::isfinite(cfg.g)) throw ConfigError("--g must be negative (attractive delta)");
    if (!(cfg.x_min < cfg.x_max)) throw ConfigError("--xmin must be below --xmax");
    if (cfg.n_points < 3) throw ConfigError("--points must be at least 3");
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("--format must be csv or json");
    for (double C : cfg.C_list)
        if (!std::isfinite(C)) throw ConfigError("--C values must be finite");
    for (double k : cfg.k_list)
        if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("--k values must be positive");
}

inline void require_allowed(const RunConfig& cfg) {
    for (double C : cfg.C_list) {
        const auto p = IsoParameter::of(C);
        if (!p.normalizable() && !cfg.allow_singular)
            throw ConfigError("C=" + format_number(C) + " is " + std::string(to_string(p.classification)) +
                              "; pass --allow-singular to emit it");
    }
}

inline std::vector<SingularRow> scan(const RunConfig& cfg, const Grid& grid) {
    std::vector<SingularRow> rows;
    for (double C : cfg.C_list)
        for (const auto& loc : singularity_scan(DeltaCoupling(cfg.g), C, grid).locations)
            rows.push_back({C, loc.x, loc.half_line});
    return rows;
}

inline Output render(const std::string& command, const RunConfig& cfg, const Table& t,
                     const std::vector<SingularRow>& poles) {
    if (cfg.format == "json") {
        json j = header_json(command, cfg);
        j["columns"] = t.names;
        j["data"] = table_json(t);
        j["singularities"] = singularity_json(poles);
        return {j.dump(2) + "\n", {}};
    }
    return {to_csv(t), poles.empty() ? std::string{} : to_csv(singularity_table(poles))};
}

inline std::vector<double> grid_axis(const Grid& grid) {
    std::vector<double> x(grid.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = grid.x(i);
    return x;
}

inline std::vector<double> values_of(const GridFunction& f) { return {f.values().begin(), f.values().end()}; }

// ---------------------------------------------------------------------------
// Commands

inline Output cmd_family(const RunConfig& cfg) {
    validate(cfg);
    require_allowed(cfg);
    const Grid grid = cfg.grid();
    const DeltaCoupling g(cfg.g);
    Table t;
    t.add("x", grid_axis(grid));
    for (double C : cfg.C_list) t.add(column_name(C), values_of(sample_iso_tail(g, C, grid, cfg.allow_singular)));
    return render("family", cfg, t, scan(cfg, grid));
}

inline Output cmd_wavefunction(const RunConfig& cfg) {
    validate(cfg);
    require_allowed(cfg);
    const Grid grid = cfg.grid();
    const DeltaCoupling g(cfg.g);
    if (cfg.normalized)
        for (double C : cfg.C_list)
            if (!IsoParameter::of(C).normalizable())
                throw ConfigError("C=" + format_number(C) + " cannot be normalized; use --unnormalized");
    Table t;
    t.add("x", grid_axis(grid));
    if (!cfg.normalized) t.add("psi0", values_of(sample_ground_state(g, grid)));
    for (double C : cfg.C_list)
        t.add(column_name(C), values_of(sample_iso_wavefunction(g, C, grid, cfg.normalized, cfg.allow_singular)));
    return render("wavefunction", cfg, t, scan(cfg, grid));
}

inline Output cmd_singularities(const RunConfig& cfg) {
    validate(cfg);
    const auto rows = scan(cfg, cfg.grid());
    if (cfg.format == "json") {
        json j = header_json("singularities", cfg);
        j["singularities"] = singularity_json(rows);
        return {j.dump(2) + "\n", {}};
    }
    return {to_csv(singularity_table(rows)), {}};
}

/// Symmetric grid with the config spacing, widened until the closed-form tail is below
/// the scattering edge tolerance at both walls.
inline Grid scattering_grid(const RunConfig& cfg, std::optional<double> C) {
    const Grid base = cfg.grid();
    const double h = base.spacing();
    double half = std::max(std::abs(base.x_min()), std::abs(base.x_max()));
    if (C) {
        const DeltaCoupling g(cfg.g);
        auto edge = [&](double L) {
            return std::max(std::abs(iso_tail(g, *C, L)), std::abs(iso_tail(g, *C, -L)));
        };
        while (edge(half) > 1e-9 && half < 1e4) half += 5.0;
    }
    return Grid::symmetric_with_spacing(half, h);
}

struct ScatterRow {
    std::optional<double> C;
    ScatteringResult result;
};

inline std::vector<ScatterRow> scatter_rows(const RunConfig& cfg) {
    const DeltaCoupling g(cfg.g);
    std::vector<ScatterRow> rows;
    std::vector<std::optional<double>> members{std::nullopt};
    for (double C : cfg.C_list) members.emplace_back(C);
    for (const auto& C : members) {
        const Grid grid = scattering_grid(cfg, C);
        const auto v = C ? family_member(g, *C, grid) : bare_delta(g, grid);
        for (double k : cfg.k_list) rows.push_back({C, scattering(v, k)});
    }
    return rows;
}

inline Output cmd_scatter(const RunConfig& cfg) {
    validate(cfg);
    for (double C : cfg.C_list)
        if (!IsoParameter::of(C).normalizable())
            throw ConfigError("C=" + format_number(C) + " is " + std::string(to_string(IsoParameter::of(C).classification)) +
                              "; scattering needs a regular member");
    const auto rows = scatter_rows(cfg);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (cfg.format == "json") {
        json j = header_json("scatter", cfg);
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"C", r.C ? json(*r.C) : json(nullptr)},
                           {"k", r.result.k},
                           {"reflection", r.result.reflection()},
                           {"transmission", r.result.transmission()},
                           {"flux", r.result.flux()},
                           {"transmission_delta", 4 * r.result.k * r.result.k / (4 * r.result.k * r.result.k + cfg.g * cfg.g)}});
        j["scattering"] = std::move(arr);
        return {j.dump(2) + "\n", {}};
    }
    Table t;
    std::vector<double> C, k, R2, T2, flux, ref;
    for (const auto& r : rows) {
        C.push_back(r.C.value_or(nan));
        k.push_back(r.result.k);
        R2.push_back(r.result.reflection());
        T2.push_back(r.result.transmission());
        flux.push_back(r.result.flux());
        ref.push_back(4 * r.result.k * r.result.k / (4 * r.result.k * r.result.k + cfg.g * cfg.g));
    }
    t.add("C", C);
    t.add("k", k);
    t.add("reflection", R2);
    t.add("transmission", T2);
    t.add("flux", flux);
    t.add("transmission_delta", ref);
    return {to_csv(t), {}};
}

// --- verify -------------------------------------------------------------------

struct Check {
    std::string name;
    double measured;
    double tolerance;
    bool pass;
};

inline void add_check(std::vector<Check>& checks, std::string name, double measured, double tolerance) {
    checks.push_back({std::move(name), measured, tolerance, std::isfinite(measured) && measured <= tolerance});
}

inline std::string member_label(std::optional<double> C) { return C ? column_name(*C) : std::string("bare"); }

/// Grid for the numeric-vs-closed-form family check: spacing 5e-4, wide enough that the
/// truncated ground-state mass is negligible.
inline Grid fine_grid(double g) { return Grid::symmetric_with_spacing(std::max(50.0, 25.0 / -g), 5e-4); }

struct VerifyReport {
    json report;
    bool pass;
};

inline VerifyReport run_verify(const RunConfig& cfg) {
    validate(cfg);
    for (double C : cfg.C_list) {
        const auto p = IsoParameter::of(C);
        if (!p.normalizable())
            throw ConfigError("C=" + format_number(C) + " is " + std::string(to_string(p.classification)) +
                              "; verify needs normalizable members");
    }
    const Grid grid = cfg.grid();
    const double h = grid.spacing();
    const DeltaCoupling g(cfg.g);
    const double E0 = bound_energy(g);
    std::vector<Check> checks;
    json energies = json::array();

    std::vector<std::optional<double>> members{std::nullopt};
    for (double C : cfg.C_list) members.emplace_back(C);

    for (const auto& C : members) {
        const auto label = member_label(C);
        const auto v = C ? family_member(g, *C, grid) : bare_delta(g, grid);
        try {
            const auto r = ground_state_energy(v);
            energies.push_back({{"member", label},
                                {"energy", r.energy},
                                {"energy_richardson", r.energy_richardson ? json(*r.energy_richardson) : json(nullptr)},
                                {"energy_shooting", r.energy_shooting},
                                {"node_count", r.node_count},
                                {"ode_residual", r.ode_residual},
                                {"jump_residual", r.jump_residual}});
            add_check(checks, "energy[" + label + "]", std::abs(r.energy - E0), 1e-3);
            add_check(checks, "node_count[" + label + "]", r.node_count, 0.0);
            add_check(checks, "spike_vs_jump[" + label + "]", std::abs(r.energy - r.energy_shooting), 5e-3);
        } catch (const Error& e) {
            energies.push_back({{"member", label}, {"error", e.what()}});
            add_check(checks, "energy[" + label + "]", std::numeric_limits<double>::quiet_NaN(), 1e-3);
        }
    }

    json scatter = json::array();
    for (const auto& row : scatter_rows(cfg)) {
        const auto label = member_label(row.C);
        const double k = row.result.k;
        const double analytic = 4 * k * k / (4 * k * k + cfg.g * cfg.g);
        scatter.push_back({{"member", label},
                           {"k", k},
                           {"transmission", row.result.transmission()},
                           {"reflection", row.result.reflection()},
                           {"transmission_delta", analytic}});
        add_check(checks, "transmission[" + label + ",k=" + format_number(k) + "]",
                  std::abs(row.result.transmission() - analytic), 1e-3);
        add_check(checks, "flux[" + label + ",k=" + format_number(k) + "]", std::abs(row.result.flux() - 1.0), 1e-6);
    }

    const Grid fine = fine_grid(cfg.g);
    const double hf = fine.spacing();
    const auto psi0_fine = sample_ground_state(g, fine);
    const auto zero_fine = sample(fine, [](double) { return 0.0; });
    const auto psi0 = sample_ground_state(g, grid);
    const auto W0 = superpotential_from_ground_state(psi0);
    for (double C : cfg.C_list) {
        const auto label = column_name(C);
        const auto p = IsoParameter::of(C);
        const auto fam = isospectral_family_potential(zero_fine, psi0_fine, p, SupportLine::FullLine);
        const auto closed = sample_iso_tail(g, C, fine);
        const double diff = max_abs_difference(fam.potential, closed, [&](std::size_t i) {
            const double x = std::abs(fine.x(i));
            return x > 2.0 * hf + 1e-12 && x <= 10.0;
        });
        add_check(checks, "family_numeric_vs_closed[" + label + "]", diff, 1e-6);

        const auto W1 = general_riccati_superpotential(W0, p, SupportLine::FullLine);
        const auto dual = superpotential_from_ground_state(
            isospectral_ground_state(psi0, p, SupportLine::FullLine, false));
        add_check(checks, "superpotential_duality[" + label + "]", max_abs_difference(W1, dual), 10.0 * h * h);

        const auto psi = sample_iso_wavefunction(g, C, grid, true);
        add_check(checks, "norm[" + label + "]", std::abs(integrate(psi * psi) - 1.0), 1e-6);
    }

    bool pass = true;
    json arr = json::array();
    for (const auto& c : checks) {
        pass = pass && c.pass;
        arr.push_back({{"name", c.name}, {"measured", number(c.measured)}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    }
    json j = header_json("verify", cfg);
    j["bound_energy"] = E0;
    j["energies"] = std::move(energies);
    j["scattering"] = std::move(scatter);
    j["checks"] = std::move(arr);
    j["pass"] = pass;
    return {std::move(j), pass};
}

// --- figures --------------------------------------------------------------------

struct FigureFile {
    std::string name;
    std::string content;
};

inline std::string gnuplot_script(const std::string& data, const std::vector<std::string>& columns,
                                  const std::string& title) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set title '" << title << "'\n"
      << "set xlabel 'x'\n"
      << "plot ";
    for (std::size_t c = 1; c < columns.size(); ++c)
        s << (c > 1 ? ", " : "") << "'" << data << "' using 1:" << c + 1 << " with lines";
    s << "\n";
    return s.str();
}

/// The four figure datasets: potentials and normalized states for the regular C set,
/// potentials and unnormalized states (with psi0) for the singular C set.
inline std::vector<FigureFile> build_figures(const RunConfig& base) {
    validate(base);
    const std::string ext = base.format == "json" ? ".json" : ".csv";
    struct FigureSpec {
        std::string stem;
        std::vector<double> C;
        bool wavefunction;
        bool normalized;
        std::string title;
    };
    const std::vector<FigureSpec> specs{
        {"fig1_potentials", kFigure1Set, false, true, "Darboux potential contributions"},
        {"fig2_wavefunctions", kFigure1Set, true, true, "Normalized isospectral wavefunctions"},
        {"fig3_potentials", kFigure3Set, false, true, "Darboux potential contributions (singular set)"},
        {"fig4_wavefunctions", kFigure3Set, true, false, "Non-normalizable isospectral wavefunctions"},
    };
    std::vector<FigureFile> files;
    for (const auto& s : specs) {
        RunConfig cfg = base;
        cfg.C_list = s.C;
        cfg.normalized = s.normalized;
        cfg.allow_singular = true;
        const Output out = s.wavefunction ? cmd_wavefunction(cfg) : cmd_family(cfg);
        files.push_back({s.stem + ext, out.body});
        if (!out.sidecar.empty()) files.push_back({s.stem + ".singularities.csv", out.sidecar});
        if (base.gnuplot && base.format == "csv") {
            std::vector<std::string> cols{"x"};
            if (!s.normalized) cols.push_back("psi0");
            for (double C : s.C) cols.push_back(column_name(C));
            files.push_back({s.stem + ".gp", gnuplot_script(s.stem + ext, cols, s.title)});
        }
    }
    return files;
}

// ---------------------------------------------------------------------------
// Entry point

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << content;
}

inline void emit(const RunConfig& cfg, const Output& out, std::ostream& os, std::ostream& es) {
    if (cfg.out.empty()) {
        os << out.body;
        if (!out.sidecar.empty()) es << "singularities:\n" << out.sidecar;
        return;
    }
    write_file(cfg.out, out.body);
    if (!out.sidecar.empty()) write_file(cfg.out + ".singularities.csv", out.sidecar);
}

/// Parses argv and runs one subcommand. Returns the process exit code:
/// 0 success, 1 failed verification or numerical failure, 2 configuration error.
inline int run(int argc, const char* const* argv, std::ostream& os = std::cout, std::ostream& es = std::cerr) {
    CLI::App app{"Strictly isospectral deformations of the attractive delta potential", "isodelta"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "Flat key = value file mirroring the flags");
    app.require_subcommand(1);

    RunConfig cfg;
    bool unnormalized = false;
    app.add_option("--g", cfg.g, "Delta coupling (negative)")->capture_default_str();
    app.add_option("--C", cfg.C_list, "Family parameter (repeatable)");
    app.add_option("--xmin", cfg.x_min)->capture_default_str();
    app.add_option("--xmax", cfg.x_max)->capture_default_str();
    app.add_option("--points", cfg.n_points)->capture_default_str();
    app.add_option("--k", cfg.k_list, "Wavenumber (repeatable)");
    app.add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_flag("--allow-singular", cfg.allow_singular, "Emit singular members with nan markers");
    app.add_flag("--unnormalized", unnormalized, "Wavefunctions without the normalization constant");
    app.add_option("--out", cfg.out, "Output file (directory for figures)");
    app.add_flag("--gnuplot", cfg.gnuplot, "figures: also write gnuplot scripts");

    auto* family = app.add_subcommand("family", "Potential tails per C");
    auto* wave = app.add_subcommand("wavefunction", "Family ground states per C");
    auto* verify = app.add_subcommand("verify", "Isospectrality checks (JSON report)");
    auto* scatter = app.add_subcommand("scatter", "Reflection/transmission per C and k");
    auto* sing = app.add_subcommand("singularities", "Pole locations per C");
    auto* figures = app.add_subcommand("figures", "Write the four figure datasets into a directory");
    for (auto* sub : {family, wave, verify, scatter, sing, figures}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, os, es);
        return code == 0 ? 0 : 2;
    }
    cfg.normalized = !unnormalized;

    try {
        if (family->parsed()) {
            emit(cfg, cmd_family(cfg), os, es);
        } else if (wave->parsed()) {
            emit(cfg, cmd_wavefunction(cfg), os, es);
        } else if (sing->parsed()) {
            emit(cfg, cmd_singularities(cfg), os, es);
        } else if (scatter->parsed()) {
            emit(cfg, cmd_scatter(cfg), os, es);
        } else if (verify->parsed()) {
            const auto report = run_verify(cfg);
            emit(cfg, {report.report.dump(2) + "\n", {}}, os, es);
            if (!report.pass) {
                es << "verify: one or more checks failed\n";
                return 1;
            }
        } else if (figures->parsed()) {
            const std::filesystem::path dir = cfg.out.empty() ? "figures" : cfg.out;
            std::filesystem::create_directories(dir);
            for (const auto& f : build_figures(cfg)) write_file(dir / f.name, f.content);
        }
    } catch (const ConfigError& e) {
        es << "error: " << e.what() << "\n";
        return 2;
    } catch (const ForbiddenParameter& e) {
        es << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidInput& e) {
        es << "error: " << e.what() << "\n";
        return 2;
    } catch (const SingularFamilyMember& e) {
        es << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        es << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace isodelta::cli
