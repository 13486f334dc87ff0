#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "qrouter/scenario.hpp"

namespace qrouter {
namespace io {

// Shortest exact decimal form; printf uses the C locale here so the decimal
// separator is always '.'.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("io: cannot write '" + path + "'");
    out << content;
}

inline std::string timeseries_csv(const PipelineResult& r) {
    const TimeSeries& ts = r.series;
    std::string out =
        "time,kappa_c,photon,s11,s22,s33,pop_g,pop_e,"
        "flux_coh_re,flux_coh_im,f_r,f_l,f_loss,"
        "coherence_re,coherence_im,concurrence_density,"
        "trace_err,herm_err,min_eig\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out += fmt(ts.times[i]) + "," + fmt(ts.kappa[i]) + ","
               + fmt(ts.photon[i]) + "," + fmt(ts.s11[i]) + ","
               + fmt(ts.s22[i]) + "," + fmt(ts.s33[i]) + ","
               + fmt(ts.pop_g[i]) + "," + fmt(ts.pop_e[i]) + ","
               + fmt(ts.flux_coherence[i].real()) + ","
               + fmt(ts.flux_coherence[i].imag()) + ","
               + fmt(r.flux.f_r[i]) + "," + fmt(r.flux.f_l[i]) + ","
               + fmt(r.flux.f_loss[i]) + ","
               + fmt(r.coherence_density.density[i].real()) + ","
               + fmt(r.coherence_density.density[i].imag()) + ","
               + fmt(r.concurrence_density.density[i]) + ","
               + fmt(ts.trace_err[i]) + "," + fmt(ts.herm_err[i]) + ","
               + fmt(ts.min_eig[i]) + "\n";
    }
    return out;
}

inline std::string window_csv(const WindowScan& scan) {
    std::string out = "delta2,T_g,R_g,T_e,R_e\n";
    for (const WindowScanRow& row : scan.rows) {
        out += fmt(row.delta2) + "," + fmt(row.t_g) + "," + fmt(row.r_g) + ","
               + fmt(row.t_e) + "," + fmt(row.r_e) + "\n";
    }
    return out;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "index,value,status,e_r,e_l,fidelity,concurrence,coherence,error\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& r = rows[i];
        out += std::to_string(i) + "," + fmt(r.value) + ","
               + (r.ok ? "ok" : "error") + ","
               + fmt(r.e_r) + "," + fmt(r.e_l) + "," + fmt(r.fidelity) + ","
               + fmt(r.concurrence) + "," + fmt(r.coherence) + ","
               + (r.error.empty() ? "" : csv_quote(r.error)) + "\n";
    }
    return out;
}

inline Json window_info_json(const WindowInfo& w) {
    Json j;
    j["valid"] = w.valid;
    if (w.valid) {
        j["center"] = w.center;
        j["lo"] = w.lo;
        j["hi"] = w.hi;
        j["width"] = w.width;
    }
    return j;
}

inline Json steady_summary_json(const Scenario& s, const WindowScan& scan) {
    Json j;
    j["scenario"] = scenario_to_json(s);
    j["window_g"] = window_info_json(scan.window_g);
    j["window_e"] = window_info_json(scan.window_e);
    return j;
}

inline Json herald_outcome_json(const HeraldOutcome& h) {
    Json j;
    j["probability"] = h.probability;
    j["probability_norm"] = h.probability_norm;
    j["transfer_fidelity"] = h.transfer_fidelity;
    return j;
}

inline Json report_json(const Scenario& s, const PipelineResult& r) {
    Json j;
    j["scenario"] = scenario_to_json(s);
    Json res;
    res["e_r"] = r.report.e_r;
    res["e_l"] = r.report.e_l;
    res["e_loss"] = r.report.e_loss;
    res["contrast"] = r.report.contrast;
    res["fidelity_max"] = r.report.fidelity_max;
    res["fidelity_renorm"] = r.report.fidelity_renorm;
    res["phi_star"] = r.report.phi_star;
    res["phi_star_over_pi"] = r.report.phi_star / M_PI;
    res["coherence_total"] = r.report.coherence_total;
    res["concurrence"] = r.report.concurrence;
    res["theta_fit"] = r.report.theta_fit;
    res["theta_slope_raw"] = r.report.theta_slope_raw;
    j["results"] = res;
    Json h;
    h["plus"] = herald_outcome_json(r.herald_report.plus);
    h["minus"] = herald_outcome_json(r.herald_report.minus);
    h["total_weight"] = r.herald_report.total_weight;
    j["herald"] = h;
    Json d;
    d["truncation_tail"] = r.report.truncation_tail;
    d["positivity_repairs"] = r.report.positivity_repairs;
    d["trace_err_max"] = r.report.trace_err_max;
    d["herm_err_max"] = r.report.herm_err_max;
    d["min_eig_min"] = r.report.min_eig_min;
    d["ledger_defect"] = r.report.ledger_defect;
    d["coherence_imag_residual"] = r.report.coherence_imag_residual;
    j["diagnostics"] = d;
    Json integ;
    integ["steps"] = r.series.stats.steps;
    integ["rejected"] = r.series.stats.rejected;
    integ["rhs_calls"] = r.series.stats.rhs_calls;
    j["integrator"] = integ;
    return j;
}

// Data-file plotting: scripts read the CSVs written next to them.
inline std::string window_plot_script() {
    return
        "# gnuplot script: transmission windows for both flux states\n"
        "set datafile separator ','\n"
        "set xlabel 'delta2 (waveguide units)'\n"
        "set ylabel 'T, R'\n"
        "set yrange [0:1.05]\n"
        "set key outside\n"
        "plot 'window.csv' using 1:2 skip 1 with lines title 'T (flux g)', \\\n"
        "     'window.csv' using 1:3 skip 1 with lines title 'R (flux g)', \\\n"
        "     'window.csv' using 1:4 skip 1 with lines title 'T (flux e)', \\\n"
        "     'window.csv' using 1:5 skip 1 with lines title 'R (flux e)'\n";
}

inline std::string dynamics_plot_script() {
    return
        "# gnuplot script: output flux and coherence densities\n"
        "set datafile separator ','\n"
        "set xlabel 'time (waveguide units)'\n"
        "set key outside\n"
        "set multiplot layout 2,1\n"
        "set ylabel 'flux density'\n"
        "plot 'timeseries.csv' using 1:11 skip 1 with lines title 'f_R', \\\n"
        "     'timeseries.csv' using 1:12 skip 1 with lines title 'f_L'\n"
        "set ylabel 'coherence density'\n"
        "plot 'timeseries.csv' using 1:14 skip 1 with lines title 'Re C(t)', \\\n"
        "     'timeseries.csv' using 1:16 skip 1 with lines title 'concurrence density'\n"
        "unset multiplot\n";
}

inline std::string json_dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace io
}  // namespace qrouter
