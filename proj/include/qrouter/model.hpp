#pragma once

#include <cmath>

#include "qrouter/linalg.hpp"
#include "qrouter/params.hpp"

namespace qrouter {

// Hilbert space: cavity(2) x SiV(3) x flux(2), dimension 12.
// Basis index = cavity*6 + siv*2 + flux with cavity in {|0>,|1>},
// SiV in {|1>,|2>,|3>} and flux in {|g>,|e>}. Every downstream module
// depends on this ordering.
inline constexpr int kDim = 12;
inline constexpr int kLiouville = kDim * kDim;

struct OperatorSet {
    CMatrix a;          // cavity annihilation
    CMatrix s[4][4];    // s[l][j] = |l><j| on the SiV, indices 1..3
    CMatrix sigma_z_f;  // flux |e><e| - |g><g|
    CMatrix sigma_ge;   // flux lowering |g><e|
    CMatrix p_g, p_e;   // flux projectors
    CMatrix flux_lk(int l, int k) const {  // 0 = g, 1 = e
        CMatrix f = CMatrix::Zero(2, 2);
        f(l, k) = 1.0;
        return kron(kron(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)), f);
    }
};

inline OperatorSet build_operators() {
    OperatorSet ops;
    const CMatrix i2 = CMatrix::Identity(2, 2);
    const CMatrix i3 = CMatrix::Identity(3, 3);
    CMatrix a_c = CMatrix::Zero(2, 2);
    a_c(0, 1) = 1.0;
    ops.a = kron(kron(a_c, i3), i2);
    for (int l = 1; l <= 3; ++l)
        for (int j = 1; j <= 3; ++j) {
            CMatrix m = CMatrix::Zero(3, 3);
            m(l - 1, j - 1) = 1.0;
            ops.s[l][j] = kron(kron(i2, m), i2);
        }
    CMatrix sz = CMatrix::Zero(2, 2);
    sz(0, 0) = -1.0;
    sz(1, 1) = 1.0;
    ops.sigma_z_f = kron(kron(i2, i3), sz);
    CMatrix ge = CMatrix::Zero(2, 2);
    ge(0, 1) = 1.0;
    ops.sigma_ge = kron(kron(i2, i3), ge);
    CMatrix pg = CMatrix::Zero(2, 2), pe = CMatrix::Zero(2, 2);
    pg(0, 0) = 1.0;
    pe(1, 1) = 1.0;
    ops.p_g = kron(kron(i2, i3), pg);
    ops.p_e = kron(kron(i2, i3), pe);
    return ops;
}

// Rotating-frame Hamiltonian. The flux qubit shifts |1> up and |2>,|3> down
// when it is in |e> (sigma_z' = +1), and the opposite in |g>.
inline CMatrix hamiltonian(const SystemParams& p, const OperatorSet& ops) {
    CMatrix h = -p.delta2 * ops.s[2][2] - p.delta1 * ops.s[1][1]
                + p.omega_c * (ops.s[3][1] + ops.s[1][3]);
    h += (p.eta1 * ops.s[1][1] - p.eta2 * ops.s[2][2] - p.eta3 * ops.s[3][3])
         * ops.sigma_z_f;
    if (p.omega_mu != 0.0) h += 0.5 * p.omega_mu * ops.sigma_z_f;
    return h;
}

// Source-cavity release rate; Gaussian in time with peak at t = tau.
inline double kappa_c(double t, const PulseSpec& pulse) {
    const double u = t - pulse.tau_or_default();
    return pulse.peak * std::exp(-u * u / (2.0 * pulse.tau_p * pulse.tau_p));
}

// Lindblad dissipator superoperator for collapse operator A at the given rate:
// rate/2 * (2 A rho A^dag - A^dag A rho - rho A^dag A).
inline CMatrix dissipator_superop(double rate, const CMatrix& a) {
    const CMatrix ad = a.adjoint();
    const CMatrix ada = ad * a;
    return 0.5 * rate * (2.0 * superop_left(a) * superop_right(ad)
                         - superop_left(ada) - superop_right(ada));
}

inline CMatrix commutator_superop(const CMatrix& h) {
    return Complex(0.0, -1.0) * (superop_left(h) - superop_right(h));
}

// Liouvillian split by time dependence:
//   L(t) = L0 + kappa_c(t) * L_cav + sqrt(kappa_c(t)) * L_casc.
// L0 carries the Hamiltonian and the time-independent dissipators, L_cav the
// unit-rate cavity decay, and L_casc the unidirectional cascade that feeds
// the cavity output into the |2>->|3> absorption of the SiV.
struct LiouvillianParts {
    CMatrix l0;
    CMatrix l_cav;
    CMatrix l_casc;
};

inline LiouvillianParts liouvillian_parts(const SystemParams& p,
                                          const OperatorSet& ops) {
    LiouvillianParts parts;
    const CMatrix h = hamiltonian(p, ops);
    parts.l0 = commutator_superop(h);
    parts.l0 += dissipator_superop(p.gamma1, ops.s[1][3]);
    parts.l0 += dissipator_superop(p.gamma2_total(), ops.s[2][3]);
    parts.l0 += dissipator_superop(p.gamma_f, ops.sigma_ge);
    parts.l0 += dissipator_superop(p.gamma_star, ops.sigma_z_f);

    parts.l_cav = dissipator_superop(1.0, ops.a);

    // -sqrt(xi_c kappa_c xi_2 Gamma2) (S32 a rho - a rho S32
    //                                  + rho a^dag S23 - S23 rho a^dag),
    // with the sqrt(kappa_c) factor pulled out into the time dependence.
    const double c = std::sqrt(p.xi_c * p.xi_2 * p.gamma2_total());
    const CMatrix& s32 = ops.s[3][2];
    const CMatrix& s23 = ops.s[2][3];
    const CMatrix ad = ops.a.adjoint();
    parts.l_casc = -c * (superop_left(s32 * ops.a)
                         - superop_left(ops.a) * superop_right(s32)
                         + superop_right(ad * s23)
                         - superop_left(s23) * superop_right(ad));
    return parts;
}

}  // namespace qrouter
