#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <qrouter/qrouter.hpp>

namespace fs = std::filesystem;
using namespace qrouter;

namespace {

struct CommonOpts {
    std::string config;
    std::string out;
    std::string format;
    int samples = 0;
    double rtol = 0.0;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "Scenario configuration (JSON)")
        ->required();
    cmd->add_option("--out", o.out,
                    "Output directory (default: config outputs.directory, "
                    "then $QROUTER_OUT_DIR, then '.')");
    cmd->add_option("--format", o.format, "Restrict outputs to one format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--samples", o.samples, "Override grid.samples");
    cmd->add_option("--rtol", o.rtol, "Override grid.rtol");
    cmd->add_option("--threads", o.threads, "Worker threads for sweep runs");
}

Scenario load_with_overrides(const CommonOpts& o) {
    Scenario s = load_scenario(o.config);
    if (o.samples > 0) s.grid.samples = o.samples;
    if (o.rtol > 0.0) s.grid.rtol = o.rtol;
    if (!o.format.empty()) s.outputs.formats = {o.format};
    return s;
}

fs::path resolve_out(const CommonOpts& o, const Scenario& s) {
    std::string dir;
    if (!o.out.empty()) dir = o.out;
    else if (!s.outputs.directory.empty()) dir = s.outputs.directory;
    else if (const char* env = std::getenv("QROUTER_OUT_DIR")) dir = env;
    else dir = ".";
    fs::create_directories(dir);
    return dir;
}

bool wants(const Scenario& s, const std::string& f) {
    return std::find(s.outputs.formats.begin(), s.outputs.formats.end(), f)
           != s.outputs.formats.end();
}

fs::path exe_dir() {
    std::error_code ec;
    const fs::path p = fs::read_symlink("/proc/self/exe", ec);
    if (ec) return fs::current_path();
    return p.parent_path();
}

fs::path find_presets_dir() {
    if (const char* env = std::getenv("QROUTER_PRESETS")) {
        if (fs::is_directory(env)) return env;
        throw ConfigError(std::string("presets: $QROUTER_PRESETS='") + env
                          + "' is not a directory");
    }
    const fs::path cands[] = {exe_dir() / "presets", exe_dir() / ".." / "presets",
                              fs::path("presets")};
    for (const fs::path& c : cands)
        if (fs::is_directory(c)) return c;
    throw ConfigError("presets: directory not found; set $QROUTER_PRESETS");
}

void cmd_steady(const CommonOpts& o) {
    const Scenario s = load_with_overrides(o);
    const WindowScan scan = window_scan(s.params, s.scan.grid());
    const fs::path out = resolve_out(o, s);
    if (wants(s, "csv")) {
        io::write_file((out / "window.csv").string(), io::window_csv(scan));
        if (s.outputs.plot_script)
            io::write_file((out / "plot_window.gp").string(),
                           io::window_plot_script());
    }
    if (wants(s, "json"))
        io::write_file((out / "summary.json").string(),
                       io::json_dump(io::steady_summary_json(s, scan)));
    auto show = [](const char* label, const WindowInfo& w) {
        if (w.valid)
            std::printf("window %s: center = %.6e  width = %.6e  span = [%.6e, %.6e]\n",
                        label, w.center, w.width, w.lo, w.hi);
        else
            std::printf("window %s: no T >= 0.5 span in scan range\n", label);
    };
    std::printf("steady scan: %zu points\n", scan.rows.size());
    show("flux g", scan.window_g);
    show("flux e", scan.window_e);
}

void print_dynamics_summary(const PipelineResult& r) {
    std::printf("e_R = %.6f  e_L = %.6f  contrast = %.6f  e_loss = %.6f\n",
                r.report.e_r, r.report.e_l, r.report.contrast, r.report.e_loss);
    std::printf("F = %.6f at phi* = %.4f pi  C_sys = %.6f  C = %.6f\n",
                r.report.fidelity_max, r.report.phi_star / M_PI,
                r.report.coherence_total, r.report.concurrence);
    std::printf("theta slope = %.6e (fit magnitude %.6e)\n",
                r.report.theta_slope_raw, r.report.theta_fit);
    std::printf("herald +: p_norm = %.6f  fid = %.6f  |  "
                "herald -: p_norm = %.6f  fid = %.6f\n",
                r.herald_report.plus.probability_norm,
                r.herald_report.plus.transfer_fidelity,
                r.herald_report.minus.probability_norm,
                r.herald_report.minus.transfer_fidelity);
}

void cmd_dynamics(const CommonOpts& o) {
    const Scenario s = load_with_overrides(o);
    const PipelineResult r = run_pipeline(s);
    const fs::path out = resolve_out(o, s);
    if (wants(s, "csv")) {
        io::write_file((out / "timeseries.csv").string(), io::timeseries_csv(r));
        if (s.outputs.plot_script)
            io::write_file((out / "plot_dynamics.gp").string(),
                           io::dynamics_plot_script());
    }
    if (wants(s, "json"))
        io::write_file((out / "report.json").string(),
                       io::json_dump(io::report_json(s, r)));
    print_dynamics_summary(r);
}

void cmd_sweep(const CommonOpts& o) {
    const Scenario s = load_with_overrides(o);
    if (!s.sweep)
        throw ConfigError("sweep: scenario has no sweep block");
    const std::vector<SweepRow> rows = run_sweep(s, std::max(1, o.threads));
    const fs::path out = resolve_out(o, s);
    if (wants(s, "csv"))
        io::write_file((out / "sweep.csv").string(), io::sweep_csv(rows));
    if (wants(s, "json")) {
        Json j;
        j["scenario"] = scenario_to_json(s);
        Json arr = Json::array();
        for (const SweepRow& r : rows) {
            Json row;
            row["value"] = r.value;
            row["status"] = r.ok ? "ok" : "error";
            if (r.ok) {
                row["e_r"] = r.e_r;
                row["e_l"] = r.e_l;
                row["fidelity"] = r.fidelity;
                row["concurrence"] = r.concurrence;
                row["coherence"] = r.coherence;
            } else {
                row["error"] = r.error;
            }
            arr.push_back(row);
        }
        j["rows"] = arr;
        io::write_file((out / "sweep.json").string(), io::json_dump(j));
    }
    std::size_t failures = 0;
    for (const SweepRow& r : rows) {
        if (r.ok)
            std::printf("%s = %-12.6g  e_R = %.6f  e_L = %.6f  F = %.6f  "
                        "C = %.6f  C_sys = %.6f\n",
                        s.sweep->parameter.c_str(), r.value, r.e_r, r.e_l,
                        r.fidelity, r.concurrence, r.coherence);
        else {
            std::printf("%s = %-12.6g  FAILED: %s\n", s.sweep->parameter.c_str(),
                        r.value, r.error.c_str());
            ++failures;
        }
    }
    if (failures > 0)
        std::printf("%zu of %zu sweep rows failed (recorded above)\n", failures,
                    rows.size());
}

void cmd_herald(const CommonOpts& o) {
    const Scenario s = load_with_overrides(o);
    const PipelineResult r = run_pipeline(s);
    const fs::path out = resolve_out(o, s);
    if (wants(s, "json")) {
        Json j;
        j["scenario"] = scenario_to_json(s);
        j["plus"] = io::herald_outcome_json(r.herald_report.plus);
        j["minus"] = io::herald_outcome_json(r.herald_report.minus);
        j["total_weight"] = r.herald_report.total_weight;
        io::write_file((out / "herald.json").string(), io::json_dump(j));
    }
    if (wants(s, "csv")) {
        std::string csv = "branch,probability,probability_norm,transfer_fidelity\n";
        csv += "plus," + io::fmt(r.herald_report.plus.probability) + ","
               + io::fmt(r.herald_report.plus.probability_norm) + ","
               + io::fmt(r.herald_report.plus.transfer_fidelity) + "\n";
        csv += "minus," + io::fmt(r.herald_report.minus.probability) + ","
               + io::fmt(r.herald_report.minus.probability_norm) + ","
               + io::fmt(r.herald_report.minus.transfer_fidelity) + "\n";
        io::write_file((out / "herald.csv").string(), csv);
    }
    std::printf("herald +: p = %.6f  p_norm = %.6f  transfer fidelity = %.6f\n",
                r.herald_report.plus.probability,
                r.herald_report.plus.probability_norm,
                r.herald_report.plus.transfer_fidelity);
    std::printf("herald -: p = %.6f  p_norm = %.6f  transfer fidelity = %.6f\n",
                r.herald_report.minus.probability,
                r.herald_report.minus.probability_norm,
                r.herald_report.minus.transfer_fidelity);
}

void cmd_presets_list() {
    const fs::path dir = find_presets_dir();
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
        std::string name = f.stem().string(), desc;
        try {
            const Scenario s = load_scenario(f.string());
            if (!s.name.empty()) name = s.name;
            desc = s.description;
        } catch (const std::exception& e) {
            desc = std::string("(invalid: ") + e.what() + ")";
        }
        std::printf("%-14s %s\n    %s\n", name.c_str(), f.string().c_str(),
                    desc.c_str());
    }
    if (files.empty())
        std::printf("no presets found in %s\n", dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-photon router simulator: pulse scattering off a "
                 "flux-tunable three-level emitter in a nanowaveguide"};
    app.require_subcommand(1);

    CommonOpts steady_o, dyn_o, sweep_o, herald_o;
    CLI::App* steady = app.add_subcommand(
        "steady", "Closed-form transmission/reflection scan over detuning");
    add_common(steady, steady_o);
    CLI::App* dynamics = app.add_subcommand(
        "dynamics", "Propagate one pulse and compute all output metrics");
    add_common(dynamics, dyn_o);
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Run the pipeline across the scenario's sweep values");
    add_common(sweep, sweep_o);
    CLI::App* herald = app.add_subcommand(
        "herald", "Propagate and report both flux-measurement outcomes");
    add_common(herald, herald_o);
    CLI::App* presets = app.add_subcommand("presets", "Preset management");
    presets->require_subcommand(1);
    presets->add_subcommand("list", "List shipped scenario presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (steady->parsed()) cmd_steady(steady_o);
        else if (dynamics->parsed()) cmd_dynamics(dyn_o);
        else if (sweep->parsed()) cmd_sweep(sweep_o);
        else if (herald->parsed()) cmd_herald(herald_o);
        else if (presets->parsed()) cmd_presets_list();
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NonConvergence& e) {
        std::fprintf(stderr, "convergence failure: %s\n", e.what());
        return 4;
    } catch (const Error& e) {
        std::fprintf(stderr, "physicality violation: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
