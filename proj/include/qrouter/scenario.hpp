#pragma once

#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qrouter/herald.hpp"
#include "qrouter/metrics.hpp"

namespace qrouter {

using Json = nlohmann::ordered_json;

struct SweepSpec {
    std::string parameter;       // dotted path, e.g. "params.gamma_star"
    std::vector<double> values;
};

struct ScanSpec {
    double delta2_min = -6e-3;
    double delta2_max = 6e-3;
    int delta2_points = 481;
    std::vector<double> explicit_values;  // overrides the range when nonempty

    std::vector<double> grid() const {
        if (!explicit_values.empty()) return explicit_values;
        if (delta2_points < 3)
            throw ConfigError("scan.delta2_points: need at least 3");
        std::vector<double> g(delta2_points);
        const double step = (delta2_max - delta2_min) / (delta2_points - 1);
        for (int i = 0; i < delta2_points; ++i)
            g[i] = delta2_min + step * i;
        return g;
    }
};

struct OutputSpec {
    std::string directory;                        // empty: resolved by caller
    std::vector<std::string> formats = {"csv", "json"};
    bool plot_script = true;
};

struct Scenario {
    std::string name;
    std::string description;
    SystemParams params;
    PulseSpec pulse;
    FluxQubitConfig flux;
    SampleGrid grid;
    ScanSpec scan;
    std::optional<SweepSpec> sweep;
    OutputSpec outputs;

    void validate() const {
        params.validate();
        pulse.validate();
        flux.validate();
        if (grid.samples < 2)
            throw ConfigError("grid.samples: need at least 2");
        if (grid.rtol <= 0.0 || grid.atol <= 0.0)
            throw ConfigError("grid.rtol/atol: must be positive");
    }
};

// Numeric fields addressable by sweeps, as dotted paths.
inline double* sweep_target(Scenario& s, const std::string& path) {
    static const std::map<std::string, std::function<double*(Scenario&)>> table = {
        {"params.delta1", [](Scenario& c) { return &c.params.delta1; }},
        {"params.delta2", [](Scenario& c) { return &c.params.delta2; }},
        {"params.eta1", [](Scenario& c) { return &c.params.eta1; }},
        {"params.eta2", [](Scenario& c) { return &c.params.eta2; }},
        {"params.eta3", [](Scenario& c) { return &c.params.eta3; }},
        {"params.omega_c", [](Scenario& c) { return &c.params.omega_c; }},
        {"params.gamma1", [](Scenario& c) { return &c.params.gamma1; }},
        {"params.gamma2", [](Scenario& c) { return &c.params.gamma2; }},
        {"params.xi_c", [](Scenario& c) { return &c.params.xi_c; }},
        {"params.xi_2", [](Scenario& c) { return &c.params.xi_2; }},
        {"params.gamma_f", [](Scenario& c) { return &c.params.gamma_f; }},
        {"params.gamma_star", [](Scenario& c) { return &c.params.gamma_star; }},
        {"params.omega_mu", [](Scenario& c) { return &c.params.omega_mu; }},
        {"pulse.tau_p", [](Scenario& c) { return &c.pulse.tau_p; }},
        {"pulse.tau", [](Scenario& c) { return &c.pulse.tau; }},
        {"pulse.peak", [](Scenario& c) { return &c.pulse.peak; }},
        {"flux.alpha", [](Scenario& c) { return &c.flux.alpha; }},
        {"flux.beta", [](Scenario& c) { return &c.flux.beta; }},
        {"flux.theta", [](Scenario& c) { return &c.flux.theta; }},
    };
    auto it = table.find(path);
    if (it == table.end())
        throw ConfigError("sweep.parameter: unknown path '" + path + "'");
    return it->second(s);
}

namespace detail {

// Strict object reader: every key must be consumed, errors carry field paths.
class FieldReader {
public:
    FieldReader(const Json& obj, std::string prefix)
        : obj_(obj), prefix_(std::move(prefix)) {
        if (!obj_.is_object())
            throw ConfigError(prefix_.empty() ? std::string("config: expected an object")
                                              : prefix_ + ": expected an object");
    }

    std::string path(const std::string& key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const Json* get(const std::string& key) {
        auto it = obj_.find(key);
        if (it == obj_.end()) return nullptr;
        used_.insert(key);
        return &*it;
    }

    std::optional<double> opt_num(const std::string& key) {
        const Json* j = get(key);
        if (!j || j->is_null()) return std::nullopt;
        if (!j->is_number())
            throw ConfigError(path(key) + ": expected a number");
        return j->get<double>();
    }

    std::optional<long long> opt_int(const std::string& key) {
        const Json* j = get(key);
        if (!j || j->is_null()) return std::nullopt;
        if (!j->is_number_integer())
            throw ConfigError(path(key) + ": expected an integer");
        return j->get<long long>();
    }

    std::optional<bool> opt_bool(const std::string& key) {
        const Json* j = get(key);
        if (!j || j->is_null()) return std::nullopt;
        if (!j->is_boolean())
            throw ConfigError(path(key) + ": expected a boolean");
        return j->get<bool>();
    }

    std::optional<std::string> opt_str(const std::string& key) {
        const Json* j = get(key);
        if (!j || j->is_null()) return std::nullopt;
        if (!j->is_string())
            throw ConfigError(path(key) + ": expected a string");
        return j->get<std::string>();
    }

    std::optional<std::vector<double>> opt_num_list(const std::string& key) {
        const Json* j = get(key);
        if (!j || j->is_null()) return std::nullopt;
        if (!j->is_array())
            throw ConfigError(path(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& v : *j) {
            if (!v.is_number())
                throw ConfigError(path(key) + ": expected an array of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }

    // value either in waveguide units (key) or in Hz (key_hz), not both
    void read_rate(const std::string& key, double anchor_hz, double& dst) {
        const bool plain = has(key), hz = has(key + "_hz");
        if (plain && hz)
            throw ConfigError(path(key) + ": give either '" + key + "' or '"
                              + key + "_hz', not both");
        if (plain) dst = *opt_num(key);
        else if (hz) dst = rate_from_hz(*opt_num(key + "_hz"), anchor_hz);
    }

    void read_time(const std::string& key, double anchor_hz, double& dst) {
        const bool plain = has(key), sec = has(key + "_seconds");
        if (plain && sec)
            throw ConfigError(path(key) + ": give either '" + key + "' or '"
                              + key + "_seconds', not both");
        if (plain) dst = *opt_num(key);
        else if (sec) dst = time_from_seconds(*opt_num(key + "_seconds"), anchor_hz);
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!used_.count(it.key()))
                throw ConfigError(path(it.key()) + ": unknown field");
    }

private:
    const Json& obj_;
    std::string prefix_;
    std::set<std::string> used_;
};

}  // namespace detail

inline Scenario parse_scenario(const Json& j) {
    Scenario s;
    detail::FieldReader top(j, "");
    if (auto v = top.opt_str("name")) s.name = *v;
    if (auto v = top.opt_str("description")) s.description = *v;

    if (const Json* pj = top.get("params")) {
        detail::FieldReader r(*pj, "params");
        if (auto v = r.opt_num("gamma_wg_hz")) s.params.gamma_wg_hz = *v;
        const double anchor = s.params.gamma_wg_hz;
        r.read_rate("delta1", anchor, s.params.delta1);
        r.read_rate("delta2", anchor, s.params.delta2);
        r.read_rate("eta1", anchor, s.params.eta1);
        r.read_rate("eta2", anchor, s.params.eta2);
        r.read_rate("eta3", anchor, s.params.eta3);
        r.read_rate("omega_c", anchor, s.params.omega_c);
        r.read_rate("gamma1", anchor, s.params.gamma1);
        r.read_rate("gamma2", anchor, s.params.gamma2);
        r.read_rate("gamma_f", anchor, s.params.gamma_f);
        r.read_rate("gamma_star", anchor, s.params.gamma_star);
        r.read_rate("omega_mu", anchor, s.params.omega_mu);
        if (auto v = r.opt_num("xi_c")) s.params.xi_c = *v;
        if (auto v = r.opt_num("xi_2")) s.params.xi_2 = *v;
        // gamma2 and xi_2 describe one split: either fixes the other through
        // xi_2 = 1/(gamma2 + 2). Derive the absent one from an in-range given
        // value; out-of-range or conflicting pairs fall through to validate().
        const bool g2_given = r.has("gamma2") || r.has("gamma2_hz");
        const bool x2_given = r.has("xi_2");
        if (g2_given && !x2_given && s.params.gamma2 >= 0.0)
            s.params.xi_2 = 1.0 / (s.params.gamma2 + 2.0);
        else if (x2_given && !g2_given
                 && s.params.xi_2 > 0.0 && s.params.xi_2 <= 0.5)
            s.params.gamma2 = 1.0 / s.params.xi_2 - 2.0;
        r.finish();
    }

    const double anchor = s.params.gamma_wg_hz;
    if (const Json* pj = top.get("pulse")) {
        detail::FieldReader r(*pj, "pulse");
        r.read_time("tau_p", anchor, s.pulse.tau_p);
        r.read_time("tau", anchor, s.pulse.tau);
        if (auto v = r.opt_num("peak")) s.pulse.peak = *v;
        r.finish();
    }

    if (const Json* fj = top.get("flux")) {
        detail::FieldReader r(*fj, "flux");
        if (auto v = r.opt_num("alpha")) s.flux.alpha = *v;
        if (auto v = r.opt_num("beta")) s.flux.beta = *v;
        if (auto v = r.opt_num("theta")) s.flux.theta = *v;
        if (auto v = r.opt_num("epsilon")) s.flux.epsilon = *v;
        if (auto v = r.opt_num("tunneling")) s.flux.tunneling = *v;
        if (auto v = r.opt_num("omega_drive")) s.flux.omega_drive = *v;
        r.finish();
    }

    if (const Json* gj = top.get("grid")) {
        detail::FieldReader r(*gj, "grid");
        r.read_time("t_end", anchor, s.grid.t_end);
        if (auto v = r.opt_int("samples")) s.grid.samples = int(*v);
        if (auto v = r.opt_num("rtol")) s.grid.rtol = *v;
        if (auto v = r.opt_num("atol")) s.grid.atol = *v;
        if (auto v = r.opt_bool("store_rho")) s.grid.store_rho = *v;
        r.finish();
    }

    if (const Json* sj = top.get("scan")) {
        detail::FieldReader r(*sj, "scan");
        if (auto v = r.opt_num("delta2_min")) s.scan.delta2_min = *v;
        if (auto v = r.opt_num("delta2_max")) s.scan.delta2_max = *v;
        if (auto v = r.opt_int("delta2_points")) s.scan.delta2_points = int(*v);
        if (auto v = r.opt_num_list("delta2_values")) s.scan.explicit_values = *v;
        r.finish();
    }

    if (const Json* wj = top.get("sweep")) {
        detail::FieldReader r(*wj, "sweep");
        SweepSpec sw;
        if (auto v = r.opt_str("parameter")) sw.parameter = *v;
        if (auto v = r.opt_num_list("values")) sw.values = *v;
        r.finish();
        if (sw.parameter.empty())
            throw ConfigError("sweep.parameter: required");
        if (sw.values.empty())
            throw ConfigError("sweep.values: must be nonempty");
        Scenario probe = s;  // reject unknown paths at parse time
        sweep_target(probe, sw.parameter);
        s.sweep = sw;
    }

    if (const Json* oj = top.get("outputs")) {
        detail::FieldReader r(*oj, "outputs");
        if (auto v = r.opt_str("directory")) s.outputs.directory = *v;
        if (auto v = r.opt_bool("plot_script")) s.outputs.plot_script = *v;
        if (const Json* fj = r.get("formats")) {
            if (!fj->is_array())
                throw ConfigError("outputs.formats: expected an array");
            s.outputs.formats.clear();
            for (const auto& f : *fj) {
                if (!f.is_string())
                    throw ConfigError("outputs.formats: expected strings");
                const std::string fs = f.get<std::string>();
                if (fs != "csv" && fs != "json")
                    throw ConfigError("outputs.formats: unknown format '" + fs + "'");
                s.outputs.formats.push_back(fs);
            }
        }
        r.finish();
    }

    top.finish();
    s.validate();
    return s;
}

inline Json scenario_to_json(const Scenario& s) {
    Json j;
    j["name"] = s.name;
    if (!s.description.empty()) j["description"] = s.description;
    Json p;
    p["delta1"] = s.params.delta1;
    p["delta2"] = s.params.delta2;
    p["eta1"] = s.params.eta1;
    p["eta2"] = s.params.eta2;
    p["eta3"] = s.params.eta3;
    p["omega_c"] = s.params.omega_c;
    p["gamma1"] = s.params.gamma1;
    p["gamma2"] = s.params.gamma2;
    p["xi_c"] = s.params.xi_c;
    p["xi_2"] = s.params.xi_2;
    p["gamma_f"] = s.params.gamma_f;
    p["gamma_star"] = s.params.gamma_star;
    p["omega_mu"] = s.params.omega_mu;
    p["gamma_wg_hz"] = s.params.gamma_wg_hz;
    j["params"] = p;
    Json pu;
    pu["tau_p"] = s.pulse.tau_p;
    if (!std::isnan(s.pulse.tau)) pu["tau"] = s.pulse.tau;
    pu["peak"] = s.pulse.peak;
    j["pulse"] = pu;
    Json f;
    f["alpha"] = s.flux.alpha;
    f["beta"] = s.flux.beta;
    f["theta"] = s.flux.theta;
    j["flux"] = f;
    Json g;
    if (!std::isnan(s.grid.t_end)) g["t_end"] = s.grid.t_end;
    g["samples"] = s.grid.samples;
    g["rtol"] = s.grid.rtol;
    g["atol"] = s.grid.atol;
    if (s.grid.store_rho) g["store_rho"] = true;
    j["grid"] = g;
    Json sc;
    if (!s.scan.explicit_values.empty()) {
        sc["delta2_values"] = s.scan.explicit_values;
    } else {
        sc["delta2_min"] = s.scan.delta2_min;
        sc["delta2_max"] = s.scan.delta2_max;
        sc["delta2_points"] = s.scan.delta2_points;
    }
    j["scan"] = sc;
    if (s.sweep) {
        Json sw;
        sw["parameter"] = s.sweep->parameter;
        sw["values"] = s.sweep->values;
        j["sweep"] = sw;
    }
    Json o;
    if (!s.outputs.directory.empty()) o["directory"] = s.outputs.directory;
    o["formats"] = s.outputs.formats;
    o["plot_script"] = s.outputs.plot_script;
    j["outputs"] = o;
    return j;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError("config: parse failure in '" + path + "': " + e.what());
    }
    return parse_scenario(j);
}

// Propagation plus the full metrics and herald pass.
struct PipelineResult {
    TimeSeries series;
    FluxSeries flux;
    EntanglementReport report;
    HeraldReport herald_report;
    CoherenceSeries coherence_density;
    ConcurrenceResult concurrence_density;
};

inline PipelineResult run_pipeline(const Scenario& s) {
    PipelineResult r;
    r.series = evolve(s.params, s.pulse, s.flux, s.grid);
    r.flux = output_flux(r.series, s.params);
    r.report = analyze(r.series);
    const PathQubitSeries pq = path_qubit_series(r.series, s.params);
    r.coherence_density = coherence(pq, r.report.theta_slope_raw,
                                    r.report.phi_star + s.flux.theta);
    r.concurrence_density = concurrence_series(pq);
    r.herald_report = herald(
        integrated_path_qubit(pq, r.report.theta_slope_raw), s.flux);
    return r;
}

// One pipeline run per sweep value; failures are recorded per row and do not
// stop the remaining rows. Row order follows the value list.
struct SweepRow {
    double value = 0.0;
    bool ok = false;
    std::string error;
    double e_r = 0.0, e_l = 0.0;
    double fidelity = 0.0, concurrence = 0.0, coherence = 0.0;
};

inline std::vector<SweepRow> run_sweep(const Scenario& base, int threads = 1) {
    if (!base.sweep)
        throw ConfigError("sweep: scenario has no sweep block");
    const SweepSpec& sw = *base.sweep;
    std::vector<SweepRow> rows(sw.values.size());
    auto work = [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.value = sw.values[i];
        try {
            Scenario s = base;
            *sweep_target(s, sw.parameter) = sw.values[i];
            s.validate();
            const PipelineResult res = run_pipeline(s);
            row.e_r = res.report.e_r;
            row.e_l = res.report.e_l;
            row.fidelity = res.report.fidelity_max;
            row.concurrence = res.report.concurrence;
            row.coherence = res.report.coherence_total;
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    };
    if (threads <= 1) {
        for (std::size_t i = 0; i < sw.values.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        const std::size_t n = std::min<std::size_t>(std::size_t(threads),
                                                    sw.values.size());
        for (std::size_t t = 0; t < n; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < sw.values.size();
                     i = next.fetch_add(1))
                    work(i);
            });
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace qrouter
