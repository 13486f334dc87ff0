#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "qrouter/errors.hpp"

namespace qrouter {

// All rates and frequencies are in units of Gamma_wg, the |3>->|2> emission
// rate into one waveguide direction (2*Gamma_wg into both); time is in units
// of 1/Gamma_wg. gamma_wg_hz anchors the unit system to physical Hz
// (Gamma_wg / 2pi) for configs that specify *_hz or *_seconds fields.
struct SystemParams {
    double delta1 = 0.0;      // one-photon detuning of the control on |1>-|3>
    double delta2 = 0.0;      // detuning of the input photon on |2>-|3>
    double eta1 = 0.0;        // flux-qubit dispersive shift of |1>
    double eta2 = 0.0;        // shift of |2>
    double eta3 = 0.0;        // shift of |3>
    double omega_c = 0.0;     // control Rabi frequency on |1>-|3>
    double gamma1 = 0.0;      // non-waveguide |3>->|1> decay
    double gamma2 = 0.0;      // non-waveguide |3>->|2> decay
    double xi_c = 1.0;        // source-cavity extraction efficiency kappa_ex/kappa_c
    double xi_2 = 0.5;        // waveguide branching Gamma_wg / Gamma2
    double gamma_f = 0.0;     // flux-qubit relaxation
    double gamma_star = 0.0;  // flux-qubit pure dephasing
    double omega_mu = 0.0;    // residual flux-qubit splitting in the rotating frame
    double gamma_wg_hz = 3e8; // physical anchor: Gamma_wg / 2pi in Hz

    // Total |3>->|2> decay. xi_2 and gamma2 describe the same split and are
    // reconciled by validate().
    double gamma2_total() const { return gamma2 + 2.0; }

    void validate() const {
        auto bad = [](const std::string& msg) { throw ConfigError("params." + msg); };
        for (double v : {delta1, delta2, eta1, eta2, eta3, omega_c, gamma1,
                         gamma2, xi_c, xi_2, gamma_f, gamma_star, omega_mu,
                         gamma_wg_hz})
            if (!std::isfinite(v)) bad("*: all entries must be finite");
        if (gamma1 < 0.0) bad("gamma1: must be >= 0");
        if (gamma2 < 0.0) bad("gamma2: must be >= 0");
        if (gamma_f < 0.0) bad("gamma_f: must be >= 0");
        if (gamma_star < 0.0) bad("gamma_star: must be >= 0");
        if (!(xi_c > 0.0 && xi_c <= 1.0)) bad("xi_c: must lie in (0, 1]");
        if (!(xi_2 > 0.0 && xi_2 <= 0.5)) bad("xi_2: must lie in (0, 0.5]");
        if (!(gamma_wg_hz > 0.0)) bad("gamma_wg_hz: must be > 0");
        // Gamma2 = gamma2 + 2 and xi_2 = 1/Gamma2 must describe the same split.
        if (std::abs(gamma2 - (1.0 / xi_2 - 2.0)) > 1e-9)
            bad("xi_2: inconsistent with gamma2 (xi_2 must equal 1/(gamma2 + 2))");
    }
};

// Source-cavity release pulse kappa_c(t) = peak * exp(-(t - tau)^2 / (2 tau_p^2)).
struct PulseSpec {
    double tau_p = 1e4;
    double tau = std::numeric_limits<double>::quiet_NaN();  // default 5.5 tau_p
    double peak = 2.0;

    double tau_or_default() const { return std::isnan(tau) ? 5.5 * tau_p : tau; }

    void validate() const {
        if (!(tau_p > 0.0) || !std::isfinite(tau_p))
            throw ConfigError("pulse.tau_p: must be > 0");
        if (!std::isnan(tau) && !(tau > 0.0))
            throw ConfigError("pulse.tau: must be > 0");
        if (!(peak >= 0.0) || !std::isfinite(peak))
            throw ConfigError("pulse.peak: must be >= 0");
    }
};

// Flux-qubit preparation alpha|g> + beta e^{i theta}|e>; alpha, beta are
// non-negative magnitudes. epsilon/tunneling/omega_drive document the
// hardware bias point and do not enter the routing dynamics.
struct FluxQubitConfig {
    double alpha = 1.0;
    double beta = 0.0;
    double theta = 0.0;
    double epsilon = 0.0;
    double tunneling = 0.0;
    double omega_drive = 0.0;

    void validate() const {
        if (!(alpha >= 0.0) || !(beta >= 0.0))
            throw ConfigError("flux.alpha/beta: magnitudes must be >= 0");
        if (std::abs(alpha * alpha + beta * beta - 1.0) > 1e-12)
            throw ConfigError("flux.alpha/beta: alpha^2 + beta^2 must equal 1");
        if (!std::isfinite(theta))
            throw ConfigError("flux.theta: must be finite");
    }
};

// Physical-unit conversions through the gamma_wg_hz anchor. A *_hz field is
// the rate divided by 2pi; a *_seconds field is laboratory time.
inline double rate_from_hz(double hz, double anchor_hz) { return hz / anchor_hz; }
inline double hz_from_rate(double rate, double anchor_hz) { return rate * anchor_hz; }
inline double time_from_seconds(double s, double anchor_hz) {
    return s * 2.0 * M_PI * anchor_hz;
}
inline double seconds_from_time(double t, double anchor_hz) {
    return t / (2.0 * M_PI * anchor_hz);
}

}  // namespace qrouter
