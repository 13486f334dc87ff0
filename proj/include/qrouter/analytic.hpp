#pragma once

#include <cmath>
#include <vector>

#include "qrouter/errors.hpp"
#include "qrouter/linalg.hpp"
#include "qrouter/params.hpp"

namespace qrouter {

enum class FluxState { ground, excited };

struct ScatteringAmplitudes {
    Complex t_amp;
    Complex r_amp;
    double transmission = 0.0;
    double reflection = 0.0;
    double delta_eff = 0.0;  // effective two-photon detuning diagnostic
};

// Closed-form single-photon scattering off the flux-shifted Lambda system.
// Upper signs (flux |e>) shift |1> up and |2>,|3> down by eta_j; lower signs
// are the |g> case. With gamma1 = gamma2 = 0 the numerator and denominator
// are conjugates, so |t_e| = 1 and T + R = 1.
inline ScatteringAmplitudes steady_scatter(const SystemParams& p, FluxState f) {
    const double s = (f == FluxState::excited) ? +1.0 : -1.0;
    const Complex b1 = (p.delta2 - p.delta1) + s * (p.eta1 + p.eta2);
    const Complex b2 = p.delta2 + s * p.eta2 - s * p.eta3
                       - Complex(0.0, p.gamma1 + p.gamma2);
    const double oc2 = p.omega_c * p.omega_c;
    const Complex num = b1 * (b2 + Complex(0.0, 1.0)) - oc2;
    const Complex den = b1 * (b2 - Complex(0.0, 1.0)) - oc2;
    if (std::abs(den) <= 1e-30)
        throw DegenerateDenominator(
            "steady_scatter: bracket products and omega_c^2 vanish together");
    const Complex te = num / den;
    ScatteringAmplitudes out;
    out.t_amp = 0.5 * (te + 1.0);
    out.r_amp = out.t_amp - 1.0;  // keeps t - r = 1 exactly
    out.transmission = std::norm(out.t_amp);
    out.reflection = std::norm(out.r_amp);
    out.delta_eff = p.delta1 - p.delta2 - s * (2.0 * p.eta3 + p.eta1 - p.eta2);
    return out;
}

struct WindowScanRow {
    double delta2;
    double t_g, r_g, t_e, r_e;
};

struct WindowInfo {
    bool valid = false;
    double center = 0.0;
    double lo = 0.0, hi = 0.0;  // T >= 0.5 crossings around the peak
    double width = 0.0;
};

struct WindowScan {
    std::vector<WindowScanRow> rows;
    WindowInfo window_g, window_e;
};

namespace detail {

inline WindowInfo locate_window(const std::vector<double>& x,
                                const std::vector<double>& t) {
    WindowInfo w;
    std::size_t peak = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] > t[peak]) peak = i;
    if (t[peak] < 0.5) return w;
    w.valid = true;
    w.center = x[peak];
    if (peak > 0 && peak + 1 < t.size()) {
        // parabolic refinement of the peak position
        const double d1 = t[peak] - t[peak - 1], d2 = t[peak] - t[peak + 1];
        const double denom = d1 + d2;
        if (denom > 1e-15)
            w.center = x[peak]
                       + 0.5 * (x[peak + 1] - x[peak - 1]) / 2.0
                             * (d1 - d2) / denom;
    }
    std::size_t i = peak;
    while (i > 0 && t[i - 1] >= 0.5) --i;
    if (i == 0) {
        w.lo = x.front();
    } else {
        const double f = (0.5 - t[i - 1]) / (t[i] - t[i - 1]);
        w.lo = x[i - 1] + f * (x[i] - x[i - 1]);
    }
    std::size_t j = peak;
    while (j + 1 < t.size() && t[j + 1] >= 0.5) ++j;
    if (j + 1 == t.size()) {
        w.hi = x.back();
    } else {
        const double f = (t[j] - 0.5) / (t[j] - t[j + 1]);
        w.hi = x[j] + f * (x[j + 1] - x[j]);
    }
    w.width = w.hi - w.lo;
    return w;
}

}  // namespace detail

// Transmission/reflection for both flux states across a delta2 grid, plus the
// transparency window (contiguous T >= 0.5 span around the peak) per state.
inline WindowScan window_scan(const SystemParams& p,
                              const std::vector<double>& delta2_grid) {
    if (delta2_grid.size() < 3)
        throw ConfigError("window_scan: need at least 3 grid points");
    WindowScan scan;
    std::vector<double> tg, te;
    tg.reserve(delta2_grid.size());
    te.reserve(delta2_grid.size());
    for (double d2 : delta2_grid) {
        SystemParams q = p;
        q.delta2 = d2;
        const auto g = steady_scatter(q, FluxState::ground);
        const auto e = steady_scatter(q, FluxState::excited);
        scan.rows.push_back({d2, g.transmission, g.reflection,
                             e.transmission, e.reflection});
        tg.push_back(g.transmission);
        te.push_back(e.transmission);
    }
    scan.window_g = detail::locate_window(delta2_grid, tg);
    scan.window_e = detail::locate_window(delta2_grid, te);
    return scan;
}

// Routing contrast |e_R - e_L| / (e_R + e_L).
inline double contrast(double e_r, double e_l) {
    if (e_r < -1e-10 || e_l < -1e-10)
        throw NegativeFlux("contrast: negative integrated flux");
    e_r = std::max(e_r, 0.0);
    e_l = std::max(e_l, 0.0);
    if (e_r + e_l <= 1e-12)
        throw ZeroFlux("contrast: total output flux vanishes");
    return std::abs(e_r - e_l) / (e_r + e_l);
}

}  // namespace qrouter
