#pragma once

#include <cmath>

#include "qrouter/metrics.hpp"

namespace qrouter {

// Flux measurement in the (|e> +- |g>)/sqrt(2) basis collapses the path
// qubit. Branch probabilities are unnormalized weights of the integrated
// path x flux matrix; they sum to e_R + e_L.
enum class HeraldBranch { plus, minus };

struct HeraldOutcome {
    HeraldBranch branch = HeraldBranch::plus;
    double probability = 0.0;          // unnormalized branch weight
    double probability_norm = 0.0;     // weight / (total over both branches)
    double transfer_fidelity = 0.0;    // <psi_t| rho_path |psi_t>
    Eigen::Matrix2cd rho_path;         // normalized, correction applied
};

struct HeraldReport {
    HeraldOutcome plus, minus;
    double total_weight = 0.0;  // p_plus + p_minus = e_R + e_L
};

namespace detail {

inline HeraldOutcome herald_one(const Eigen::Matrix4cd& integrated,
                                const FluxQubitConfig& flux,
                                HeraldBranch branch) {
    const double sign = branch == HeraldBranch::plus ? 1.0 : -1.0;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double amp[2] = {sign * inv_sqrt2, inv_sqrt2};  // on |g>, |e>
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for (int A = 0; A < 2; ++A)
        for (int B = 0; B < 2; ++B)
            for (int l = 0; l < 2; ++l)
                for (int k = 0; k < 2; ++k)
                    rho(A, B) += amp[l] * integrated(A * 2 + l, B * 2 + k)
                                 * amp[k];
    HeraldOutcome out;
    out.branch = branch;
    out.probability = rho.trace().real();
    if (out.probability < 1e-12)
        throw ZeroProbabilityBranch("herald: branch weight below 1e-12");
    rho /= out.probability;
    if (branch == HeraldBranch::plus) {
        // this branch lands on alpha|R> - beta|L>; a path-Z fixes the sign
        rho(0, 1) *= -1.0;
        rho(1, 0) *= -1.0;
    }
    rho = 0.5 * (rho + rho.adjoint().eval());
    out.rho_path = rho;
    Eigen::Vector2cd target;
    target << flux.alpha, flux.beta * std::exp(Complex(0.0, flux.theta));
    out.transfer_fidelity = (target.adjoint() * rho * target)(0, 0).real();
    return out;
}

}  // namespace detail

// integrated: output of integrated_path_qubit (fast R-L phase removed).
inline HeraldReport herald(const Eigen::Matrix4cd& integrated,
                           const FluxQubitConfig& flux) {
    HeraldReport rep;
    rep.plus = detail::herald_one(integrated, flux, HeraldBranch::plus);
    rep.minus = detail::herald_one(integrated, flux, HeraldBranch::minus);
    rep.total_weight = rep.plus.probability + rep.minus.probability;
    rep.plus.probability_norm = rep.plus.probability / rep.total_weight;
    rep.minus.probability_norm = rep.minus.probability / rep.total_weight;
    return rep;
}

// Convenience driver: propagation results straight to herald outcomes.
inline HeraldReport herald_from_series(const TimeSeries& ts) {
    const PathQubitSeries pq = path_qubit_series(ts, ts.params);
    std::vector<Complex> c1(pq.mats.size());
    double c1_max = 0.0;
    for (std::size_t i = 0; i < pq.mats.size(); ++i) {
        c1[i] = pq.mats[i](0, 3);
        c1_max = std::max(c1_max, std::abs(c1[i]));
    }
    double slope = 0.0;
    if (ts.flux.alpha * ts.flux.beta > 0.0 && c1_max > 1e-12)
        slope = fit_theta(pq.times, c1);
    return herald(integrated_path_qubit(pq, slope), ts.flux);
}

}  // namespace qrouter
