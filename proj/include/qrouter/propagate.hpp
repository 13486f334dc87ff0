#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "qrouter/integrate.hpp"
#include "qrouter/model.hpp"

namespace qrouter {

struct DensityMatrix {
    CMatrix rho;
    double time = 0.0;
};

// rho(0) = |1>_cav |2>_SiV (alpha|g> + beta e^{i theta}|e>), photon loaded in
// the source cavity, SiV parked in |2>, flux qubit in the prepared pure state.
inline DensityMatrix initial_state(const FluxQubitConfig& flux) {
    flux.validate();
    Eigen::Vector2cd psi_f(flux.alpha,
                           flux.beta * std::exp(Complex(0.0, flux.theta)));
    CMatrix rho_f = psi_f * psi_f.adjoint();
    CMatrix cav = CMatrix::Zero(2, 2);
    cav(1, 1) = 1.0;
    CMatrix siv = CMatrix::Zero(3, 3);
    siv(1, 1) = 1.0;
    return {kron(kron(cav, siv), rho_f), 0.0};
}

struct SampleGrid {
    double t_end = std::numeric_limits<double>::quiet_NaN();  // default tau + 6 tau_p
    int samples = 4000;
    double rtol = 1e-8;
    double atol = 1e-10;
    bool store_rho = false;

    double t_end_or_default(const PulseSpec& pulse) const {
        return std::isnan(t_end) ? pulse.tau_or_default() + 6.0 * pulse.tau_p
                                 : t_end;
    }
};

// Uniformly sampled expectation values. Two-operator output moments
// <X^dag |l><k| Y> with X, Y in {a, S23} and l, k in {g, e} are recorded
// during propagation; downstream metrics never need the full state.
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> kappa;                 // kappa_c(t)
    std::vector<double> photon;                // <a^dag a>
    std::vector<double> s11, s22, s33;         // SiV populations
    std::vector<double> pop_g, pop_e;          // flux populations
    std::vector<Complex> flux_coherence;       // <|g><e|>
    std::array<std::vector<Complex>, 16> moments;
    std::vector<double> trace_err, herm_err, min_eig;
    std::vector<CMatrix> rho_samples;          // filled when grid.store_rho

    SystemParams params;
    PulseSpec pulse;
    FluxQubitConfig flux;
    Dp5Stepper::Stats stats;

    // x, y: 0 = cavity a, 1 = SiV S23.  l, k: 0 = g, 1 = e.
    static int mom_index(int x, int y, int l, int k) {
        return ((x * 2 + y) * 2 + l) * 2 + k;
    }
    std::size_t size() const { return times.size(); }
};

inline constexpr double kTraceTol = 1e-6;
inline constexpr double kMinEigTol = -1e-5;

// Monitor used at every sample point.
inline void check_physical(const CMatrix& rho_symmetrized, double herm_err,
                           double* min_eig_out = nullptr) {
    const double tr_err = std::abs(rho_symmetrized.trace().real() - 1.0)
                          + std::abs(rho_symmetrized.trace().imag());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_symmetrized,
                                              Eigen::EigenvaluesOnly);
    const double mineig = es.eigenvalues().minCoeff();
    if (min_eig_out) *min_eig_out = mineig;
    if (tr_err > kTraceTol)
        throw PhysicalityViolation("trace deviates from 1 beyond 1e-6");
    if (herm_err > 1e-6)
        throw PhysicalityViolation("state lost Hermiticity beyond 1e-6");
    if (mineig < kMinEigTol)
        throw PhysicalityViolation("negative eigenvalue below -1e-5");
}

namespace detail {

using SpMat = Eigen::SparseMatrix<Complex>;

// Tr[rho O] as a Liouville-space dot product vec(O^dag)^H vec(rho).
inline CVector trace_functional(const CMatrix& op) {
    return vec(CMatrix(op.adjoint()));
}

}  // namespace detail

// Integrate the cascaded master equation
//   d rho/dt = L0 rho + kappa_c(t) L_cav rho + sqrt(kappa_c(t)) L_casc rho
// from t = 0 to grid.t_end, recording expectation channels on a uniform grid.
// The state is resymmetrized at sample points only.
inline TimeSeries evolve(const SystemParams& params, const PulseSpec& pulse,
                         const FluxQubitConfig& flux, const SampleGrid& grid) {
    params.validate();
    pulse.validate();
    flux.validate();
    if (grid.samples < 2) throw ConfigError("grid.samples: need at least 2");

    const OperatorSet ops = build_operators();
    const LiouvillianParts parts = liouvillian_parts(params, ops);
    const detail::SpMat l0 = parts.l0.sparseView();
    const detail::SpMat l_cav = parts.l_cav.sparseView();
    const detail::SpMat l_casc = parts.l_casc.sparseView();

    TimeSeries ts;
    ts.params = params;
    ts.pulse = pulse;
    ts.flux = flux;

    // trace functionals for every recorded channel
    const CVector f_photon = detail::trace_functional(ops.a.adjoint() * ops.a);
    const CVector f_s11 = detail::trace_functional(ops.s[1][1]);
    const CVector f_s22 = detail::trace_functional(ops.s[2][2]);
    const CVector f_s33 = detail::trace_functional(ops.s[3][3]);
    const CVector f_pg = detail::trace_functional(ops.p_g);
    const CVector f_pe = detail::trace_functional(ops.p_e);
    const CVector f_ge = detail::trace_functional(ops.sigma_ge);
    std::array<CVector, 16> f_mom;
    const CMatrix xops[2] = {ops.a, ops.s[2][3]};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int l = 0; l < 2; ++l)
                for (int k = 0; k < 2; ++k)
                    f_mom[TimeSeries::mom_index(x, y, l, k)] =
                        detail::trace_functional(xops[x].adjoint()
                                                 * ops.flux_lk(l, k) * xops[y]);

    CVector y = vec(initial_state(flux).rho);
    CVector buf(kLiouville);
    Dp5Stepper::Options opt;
    opt.rtol = grid.rtol;
    opt.atol = grid.atol;
    Dp5Stepper stepper(
        [&](double t, const CVector& v, CVector& out) {
            const double kc = kappa_c(t, pulse);
            out.noalias() = l0 * v;
            buf.noalias() = l_cav * v;
            out += kc * buf;
            buf.noalias() = l_casc * v;
            out += std::sqrt(kc) * buf;
        },
        opt);

    const double t_end = grid.t_end_or_default(pulse);
    const int n = grid.samples;
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t_i = t_end * double(i) / double(n - 1);
        stepper.integrate_to(y, t, t_i);
        CMatrix rho = unvec(y, kDim, kDim);
        const double herm = max_asymmetry(rho);
        rho = 0.5 * (rho + rho.adjoint().eval());
        y = vec(rho);
        stepper.invalidate_cache();

        double mineig = 0.0;
        check_physical(rho, herm, &mineig);

        ts.times.push_back(t_i);
        ts.kappa.push_back(kappa_c(t_i, pulse));
        ts.photon.push_back((f_photon.dot(y)).real());
        ts.s11.push_back((f_s11.dot(y)).real());
        ts.s22.push_back((f_s22.dot(y)).real());
        ts.s33.push_back((f_s33.dot(y)).real());
        ts.pop_g.push_back((f_pg.dot(y)).real());
        ts.pop_e.push_back((f_pe.dot(y)).real());
        ts.flux_coherence.push_back(f_ge.dot(y));
        for (int m = 0; m < 16; ++m) ts.moments[m].push_back(f_mom[m].dot(y));
        ts.trace_err.push_back(std::abs(rho.trace() - Complex(1.0, 0.0)));
        ts.herm_err.push_back(herm);
        ts.min_eig.push_back(mineig);
        if (grid.store_rho) ts.rho_samples.push_back(rho);
    }
    ts.stats = stepper.stats();
    return ts;
}

}  // namespace qrouter
