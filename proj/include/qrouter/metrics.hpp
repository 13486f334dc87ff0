#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qrouter/analytic.hpp"
#include "qrouter/propagate.hpp"

namespace qrouter {

namespace detail {

inline double trapezoid(const std::vector<double>& t,
                        const std::vector<double>& f) {
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        acc += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return acc;
}

inline Complex trapezoid(const std::vector<double>& t,
                         const std::vector<Complex>& f) {
    Complex acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        acc += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return acc;
}

}  // namespace detail

// Directional output flux densities built from the recorded moments:
//   f_R = xi_c kc <a'a> + xi_2 G2 <S33> + sqrt(xi_c kc xi_2 G2) 2Re<a'S23>
//   f_L = xi_2 G2 <S33>
// f_loss is the non-waveguide drain (cavity internal loss + gamma2); the
// gamma1 channel transfers excitation into |1> where it stays counted, so it
// appears only as a diagnostic density.
struct FluxSeries {
    std::vector<double> f_r, f_l, f_loss, f_gamma1;
    double e_r = 0.0, e_l = 0.0, e_loss = 0.0;
};

inline FluxSeries output_flux(const TimeSeries& ts, const SystemParams& p) {
    const double cs2 = p.xi_2 * p.gamma2_total();
    const double cs = std::sqrt(cs2);
    FluxSeries out;
    const std::size_t n = ts.size();
    out.f_r.resize(n);
    out.f_l.resize(n);
    out.f_loss.resize(n);
    out.f_gamma1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ca = std::sqrt(p.xi_c * ts.kappa[i]);
        const Complex maa = ts.moments[TimeSeries::mom_index(0, 0, 0, 0)][i]
                            + ts.moments[TimeSeries::mom_index(0, 0, 1, 1)][i];
        const Complex mss = ts.moments[TimeSeries::mom_index(1, 1, 0, 0)][i]
                            + ts.moments[TimeSeries::mom_index(1, 1, 1, 1)][i];
        const Complex mas = ts.moments[TimeSeries::mom_index(0, 1, 0, 0)][i]
                            + ts.moments[TimeSeries::mom_index(0, 1, 1, 1)][i];
        double fr = ca * ca * maa.real() + cs2 * mss.real()
                    + 2.0 * ca * cs * mas.real();
        double fl = cs2 * mss.real();
        if (fr < -1e-10 || fl < -1e-10)
            throw NegativeFlux("output_flux: flux density below -1e-10");
        out.f_r[i] = std::max(fr, 0.0);
        out.f_l[i] = std::max(fl, 0.0);
        out.f_loss[i] = (1.0 - p.xi_c) * ts.kappa[i] * ts.photon[i]
                        + p.gamma2 * ts.s33[i];
        out.f_gamma1[i] = p.gamma1 * ts.s33[i];
    }
    out.e_r = detail::trapezoid(ts.times, out.f_r);
    out.e_l = detail::trapezoid(ts.times, out.f_l);
    out.e_loss = detail::trapezoid(ts.times, out.f_loss);
    return out;
}

// Retained excitation plus everything emitted or lost must stay at 1:
//   <a'a> + <S33> + <S11> + int_0^t (f_R + f_L + f_loss) = 1.
// Returns the worst defect across the grid.
inline double excitation_ledger_defect(const TimeSeries& ts,
                                       const FluxSeries& fs) {
    double acc = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i > 0) {
            const double dt = ts.times[i] - ts.times[i - 1];
            acc += 0.5 * dt * (fs.f_r[i] + fs.f_l[i] + fs.f_loss[i]
                               + fs.f_r[i - 1] + fs.f_l[i - 1] + fs.f_loss[i - 1]);
        }
        const double n = ts.photon[i] + ts.s33[i] + ts.s11[i];
        worst = std::max(worst, std::abs(n + acc - 1.0));
    }
    return worst;
}

// Unnormalized path x flux density matrix in the basis
// {(R,g), (R,e), (L,g), (L,e)}; trace equals f_R + f_L.
struct PathQubitSeries {
    std::vector<double> times;
    std::vector<Eigen::Matrix4cd> mats;
};

inline PathQubitSeries path_qubit_series(const TimeSeries& ts,
                                         const SystemParams& p) {
    const double cs = std::sqrt(p.xi_2 * p.gamma2_total());
    PathQubitSeries s;
    s.times = ts.times;
    s.mats.resize(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double ca = std::sqrt(p.xi_c * ts.kappa[i]);
        // coefficient of operator X in C_A: A = R mixes the cavity output and
        // the forward SiV emission, A = L is backward SiV emission only.
        const double coef[2][2] = {{ca, cs}, {0.0, cs}};
        Eigen::Matrix4cd m;
        for (int A = 0; A < 2; ++A)
            for (int l = 0; l < 2; ++l)
                for (int B = 0; B < 2; ++B)
                    for (int k = 0; k < 2; ++k) {
                        Complex v = 0.0;
                        for (int x = 0; x < 2; ++x)
                            for (int y = 0; y < 2; ++y)
                                v += coef[A][x] * coef[B][y]
                                     * ts.moments[TimeSeries::mom_index(x, y, l, k)][i];
                        m(A * 2 + l, B * 2 + k) = v;
                    }
        s.mats[i] = 0.5 * (m + m.adjoint().eval());
    }
    return s;
}

// Same matrix evaluated directly from a stored state; cross-checks the
// moment bookkeeping. kappa_now = kappa_c at rho.time.
inline Eigen::Matrix4cd reduced_path_qubit(const DensityMatrix& rho,
                                           const SystemParams& p,
                                           double kappa_now) {
    const OperatorSet ops = build_operators();
    const double ca = std::sqrt(p.xi_c * kappa_now);
    const double cs = std::sqrt(p.xi_2 * p.gamma2_total());
    const CMatrix c_op[2] = {ca * ops.a + cs * ops.s[2][3], cs * ops.s[2][3]};
    Eigen::Matrix4cd m;
    for (int A = 0; A < 2; ++A)
        for (int l = 0; l < 2; ++l)
            for (int B = 0; B < 2; ++B)
                for (int k = 0; k < 2; ++k) {
                    const CMatrix op = c_op[A].adjoint() * ops.flux_lk(l, k)
                                       * c_op[B];
                    m(A * 2 + l, B * 2 + k) = (rho.rho * op).trace();
                }
    return 0.5 * (m + m.adjoint().eval());
}

// Least-squares slope of the unwrapped phase of the (R,g)-(L,e) coherence,
// restricted to samples with |C1| above 1e-2 of its maximum.
inline double fit_theta(const std::vector<double>& times,
                        const std::vector<Complex>& c1) {
    double amax = 0.0;
    for (const Complex& c : c1) amax = std::max(amax, std::abs(c));
    const double thresh = 1e-2 * amax;
    std::vector<double> t_sel, ph_sel;
    double prev = 0.0;
    double offset = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < c1.size(); ++i) {
        if (std::abs(c1[i]) <= thresh) continue;
        double ph = std::arg(c1[i]);
        if (!first) {
            while (ph + offset - prev > M_PI) offset -= 2.0 * M_PI;
            while (ph + offset - prev < -M_PI) offset += 2.0 * M_PI;
        }
        prev = ph + offset;
        first = false;
        t_sel.push_back(times[i]);
        ph_sel.push_back(prev);
    }
    if (t_sel.size() < 10)
        throw InsufficientSupport("fit_theta: fewer than 10 usable samples");
    const double n = double(t_sel.size());
    double st = 0.0, sp = 0.0, stt = 0.0, stp = 0.0;
    for (std::size_t i = 0; i < t_sel.size(); ++i) {
        st += t_sel[i];
        sp += ph_sel[i];
        stt += t_sel[i] * t_sel[i];
        stp += t_sel[i] * ph_sel[i];
    }
    const double denom = n * stt - st * st;
    if (std::abs(denom) < 1e-30)
        throw InsufficientSupport("fit_theta: degenerate time support");
    return (n * stp - st * sp) / denom;
}

// Overlap with the phase-matched target wavepacket:
//   F(phi) = a^2 I_RRgg + b^2 I_LLee
//            - 2 Re[ a b e^{-i theta} e^{-i phi} int e^{-i s t} C1(t) dt ],
// where s is the fitted raw phase slope of C1 (the e^{i Theta(t)} factor of
// the target de-rotates the coherence).
inline double fidelity(const PathQubitSeries& s, const FluxQubitConfig& flux,
                       double theta_slope_raw, double phi) {
    std::vector<double> d_rr(s.mats.size()), d_ll(s.mats.size());
    std::vector<Complex> cross(s.mats.size());
    for (std::size_t i = 0; i < s.mats.size(); ++i) {
        d_rr[i] = s.mats[i](0, 0).real();
        d_ll[i] = s.mats[i](3, 3).real();
        cross[i] = std::exp(Complex(0.0, -theta_slope_raw * s.times[i]))
                   * s.mats[i](0, 3);
    }
    const double i_rr = detail::trapezoid(s.times, d_rr);
    const double i_ll = detail::trapezoid(s.times, d_ll);
    const Complex ic = detail::trapezoid(s.times, cross);
    const Complex ab_conj = flux.alpha * flux.beta
                            * std::exp(Complex(0.0, -flux.theta));
    return flux.alpha * flux.alpha * i_rr + flux.beta * flux.beta * i_ll
           - 2.0 * (ab_conj * std::exp(Complex(0.0, -phi)) * ic).real();
}

struct FidelityScan {
    double f_max = 0.0;
    double phi_star = 0.0;
};

// 401-point scan of F(phi) over [0, 2pi) with local quadratic refinement.
inline FidelityScan fidelity_scan(const PathQubitSeries& s,
                                  const FluxQubitConfig& flux,
                                  double theta_slope_raw) {
    constexpr int kN = 401;
    const double step = 2.0 * M_PI / kN;
    std::vector<double> f(kN);
    int best = 0;
    for (int i = 0; i < kN; ++i) {
        f[i] = fidelity(s, flux, theta_slope_raw, i * step);
        if (f[i] > f[best]) best = i;
    }
    const double fm = f[(best + kN - 1) % kN], f0 = f[best],
                 fp = f[(best + 1) % kN];
    double shift = 0.0;
    const double curv = fm - 2.0 * f0 + fp;
    if (curv < -1e-30) shift = 0.5 * (fm - fp) / curv;
    const double phi = best * step + shift * step;
    FidelityScan out;
    out.phi_star = std::fmod(phi + 2.0 * M_PI, 2.0 * M_PI);
    out.f_max = fidelity(s, flux, theta_slope_raw, out.phi_star);
    if (out.f_max < f0) {  // refinement must never lose to the grid
        out.f_max = f0;
        out.phi_star = best * step;
    }
    return out;
}

// De-rotated coherence density C(t) = -e^{-i(s t + phi)} C1(t); its real part
// integrates to the system coherence. phi should include the prepared flux
// phase theta on top of the fitted phi_star.
struct CoherenceSeries {
    std::vector<Complex> density;
    double total = 0.0;
    double imag_residual = 0.0;  // max |Im| relative to max |density|
};

inline CoherenceSeries coherence(const PathQubitSeries& s,
                                 double theta_slope_raw, double phi) {
    CoherenceSeries out;
    out.density.resize(s.mats.size());
    std::vector<double> re(s.mats.size());
    double amax = 0.0, imax = 0.0;
    for (std::size_t i = 0; i < s.mats.size(); ++i) {
        out.density[i] = -std::exp(Complex(0.0, -(theta_slope_raw * s.times[i] + phi)))
                         * s.mats[i](0, 3);
        re[i] = out.density[i].real();
        amax = std::max(amax, std::abs(out.density[i]));
        imax = std::max(imax, std::abs(out.density[i].imag()));
    }
    out.total = detail::trapezoid(s.times, re);
    out.imag_residual = amax > 0.0 ? imax / amax : 0.0;
    return out;
}

// Wootters concurrence of one (possibly unnormalized) 4x4 path x flux matrix.
// Scales linearly with the matrix, so time samples integrate to a
// concurrence just like the flux densities do.
inline double concurrence4(const Eigen::Matrix4cd& m_in, int* repairs = nullptr) {
    CMatrix h = 0.5 * (CMatrix(m_in) + CMatrix(m_in).adjoint());
    EigenSystem es = herm_eig(h);
    bool repaired = false;
    for (Eigen::Index i = 0; i < 4; ++i) {
        if (es.values[i] < -1e-6)
            throw NegativeSpectrum("concurrence4: matrix is not PSD");
        if (es.values[i] < -1e-10) repaired = true;
        if (es.values[i] < 0.0) es.values[i] = 0.0;
    }
    if (repaired && repairs) ++*repairs;
    h = es.vectors * es.values.asDiagonal() * es.vectors.adjoint();
    CMatrix yy = CMatrix::Zero(4, 4);  // sigma_y x sigma_y
    yy(0, 3) = -1.0; yy(1, 2) = 1.0; yy(2, 1) = 1.0; yy(3, 0) = -1.0;
    const CMatrix ht = yy * h.conjugate() * yy;
    const CMatrix sq = psd_sqrt(h);
    const CMatrix r = psd_sqrt(sq * ht * sq);
    EigenSystem lam = herm_eig(r);  // descending
    const double c = lam.values[0] - lam.values[1] - lam.values[2] - lam.values[3];
    return std::max(0.0, c);
}

struct ConcurrenceResult {
    std::vector<double> density;
    double total = 0.0;
    int positivity_repairs = 0;
};

inline ConcurrenceResult concurrence_series(const PathQubitSeries& s) {
    ConcurrenceResult out;
    out.density.resize(s.mats.size());
    for (std::size_t i = 0; i < s.mats.size(); ++i)
        out.density[i] = concurrence4(s.mats[i], &out.positivity_repairs);
    out.total = detail::trapezoid(s.times, out.density);
    return out;
}

// Time integral of the path x flux matrix with the fast R-L phase removed
// from the cross blocks; input to the herald stage.
inline Eigen::Matrix4cd integrated_path_qubit(const PathQubitSeries& s,
                                              double theta_slope_raw) {
    Eigen::Matrix4cd acc = Eigen::Matrix4cd::Zero();
    Eigen::Matrix4cd prev = Eigen::Matrix4cd::Zero();
    for (std::size_t i = 0; i < s.mats.size(); ++i) {
        Eigen::Matrix4cd m = s.mats[i];
        const Complex rot = std::exp(Complex(0.0, -theta_slope_raw * s.times[i]));
        m.block<2, 2>(0, 2) *= rot;
        m.block<2, 2>(2, 0) *= std::conj(rot);
        if (i > 0) acc += 0.5 * (s.times[i] - s.times[i - 1]) * (m + prev);
        prev = m;
    }
    return acc;
}

struct EntanglementReport {
    double e_r = 0.0, e_l = 0.0, e_loss = 0.0;
    double contrast = 0.0;
    double fidelity_max = 0.0;
    double fidelity_renorm = 0.0;  // fidelity_max / (e_r + e_l)
    double phi_star = 0.0;
    double coherence_total = 0.0;
    double concurrence = 0.0;
    double theta_fit = 0.0;        // magnitude of the fitted phase slope
    double theta_slope_raw = 0.0;  // signed fit, diagnostic
    double truncation_tail = 0.0;
    int positivity_repairs = 0;
    double trace_err_max = 0.0, herm_err_max = 0.0, min_eig_min = 0.0;
    double ledger_defect = 0.0;
    double coherence_imag_residual = 0.0;
};

// Full metrics pass over one propagation.
inline EntanglementReport analyze(const TimeSeries& ts) {
    const SystemParams& p = ts.params;
    EntanglementReport rep;
    const FluxSeries fs = output_flux(ts, p);
    rep.e_r = fs.e_r;
    rep.e_l = fs.e_l;
    rep.e_loss = fs.e_loss;
    rep.contrast = contrast(fs.e_r, fs.e_l);
    rep.ledger_defect = excitation_ledger_defect(ts, fs);

    const PathQubitSeries pq = path_qubit_series(ts, p);
    const ConcurrenceResult cc = concurrence_series(pq);
    rep.concurrence = cc.total;
    rep.positivity_repairs = cc.positivity_repairs;

    std::vector<Complex> c1(pq.mats.size());
    double c1_max = 0.0;
    for (std::size_t i = 0; i < pq.mats.size(); ++i) {
        c1[i] = pq.mats[i](0, 3);
        c1_max = std::max(c1_max, std::abs(c1[i]));
    }
    const bool has_cross = ts.flux.alpha * ts.flux.beta > 0.0 && c1_max > 1e-12;
    if (has_cross) {
        rep.theta_slope_raw = fit_theta(pq.times, c1);
        rep.theta_fit = std::abs(rep.theta_slope_raw);
        const FidelityScan scan = fidelity_scan(pq, ts.flux, rep.theta_slope_raw);
        rep.fidelity_max = scan.f_max;
        rep.phi_star = scan.phi_star;
        const CoherenceSeries cs = coherence(pq, rep.theta_slope_raw,
                                             scan.phi_star + ts.flux.theta);
        rep.coherence_total = cs.total;
        rep.coherence_imag_residual = cs.imag_residual;
    } else {
        rep.fidelity_max = fidelity(pq, ts.flux, 0.0, 0.0);
    }
    rep.fidelity_renorm = (fs.e_r + fs.e_l) > 1e-12
                              ? rep.fidelity_max / (fs.e_r + fs.e_l)
                              : 0.0;

    rep.truncation_tail = ts.photon.back() + ts.s33.back() + ts.s11.back();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        rep.trace_err_max = std::max(rep.trace_err_max, ts.trace_err[i]);
        rep.herm_err_max = std::max(rep.herm_err_max, ts.herm_err[i]);
        rep.min_eig_min = std::min(rep.min_eig_min, ts.min_eig[i]);
    }
    return rep;
}

}  // namespace qrouter
