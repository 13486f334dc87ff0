#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <qrouter/metrics.hpp>
#include <qrouter/propagate.hpp>

using namespace qrouter;
using Catch::Matchers::WithinAbs;

namespace {

// basis index |cavity, siv level, flux>: c*6 + (s-1)*2 + f
int idx(int c, int s, int f) { return c * 6 + (s - 1) * 2 + f; }

SystemParams fig_params() {
    SystemParams p;
    p.delta1 = 0.0;
    p.delta2 = 2e-3;
    p.eta1 = p.eta2 = p.eta3 = 1e-3;
    p.omega_c = 0.03;
    return p;
}

FluxQubitConfig flux_state(double alpha, double beta, double theta = 0.0) {
    FluxQubitConfig f;
    f.alpha = alpha;
    f.beta = beta;
    f.theta = theta;
    return f;
}

}  // namespace

TEST_CASE("initial state is the pure one-photon state with the prepared flux") {
    const double a = 0.6, b = 0.8, th = 0.3;
    const DensityMatrix rho0 = initial_state(flux_state(a, b, th));
    const CMatrix& r = rho0.rho;
    CHECK_THAT(r.trace().real(), WithinAbs(1.0, 1e-15));
    CHECK_THAT((r * r).trace().real(), WithinAbs(1.0, 1e-14));  // purity
    CHECK_THAT(r(idx(1, 2, 0), idx(1, 2, 0)).real(), WithinAbs(a * a, 1e-15));
    CHECK_THAT(r(idx(1, 2, 1), idx(1, 2, 1)).real(), WithinAbs(b * b, 1e-15));
    const Complex off = r(idx(1, 2, 0), idx(1, 2, 1));
    CHECK_THAT(off.real(), WithinAbs(a * b * std::cos(th), 1e-15));
    CHECK_THAT(off.imag(), WithinAbs(-a * b * std::sin(th), 1e-15));
    CHECK_THROWS_AS(initial_state(flux_state(1.0, 1.0)), ConfigError);
}

TEST_CASE("physicality checks reject broken states") {
    CMatrix bad = CMatrix::Identity(kDim, kDim);  // trace 12
    CHECK_THROWS_AS(check_physical(bad, 0.0), PhysicalityViolation);
    CMatrix neg = CMatrix::Zero(kDim, kDim);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(check_physical(neg, 0.0), PhysicalityViolation);
}

TEST_CASE("short pulse, flux |g>: routing off the window shoulder") {
    SampleGrid grid;
    grid.samples = 4000;
    PulseSpec pulse;
    pulse.tau_p = 500.0;
    const TimeSeries ts = evolve(fig_params(), pulse, flux_state(1.0, 0.0), grid);
    const FluxSeries fs = output_flux(ts, ts.params);
    // spectrally broad pulse: most of it reflects even at the dark point
    CHECK_THAT(fs.e_r, WithinAbs(0.288009761, 2e-5));
    CHECK_THAT(fs.e_l, WithinAbs(0.711858865, 2e-5));
    CHECK(excitation_ledger_defect(ts, fs) < 1e-5);
    // physicality along the whole trajectory
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(ts.trace_err[i] < 1e-8);
        CHECK(ts.herm_err[i] < 1e-10);
        CHECK(ts.min_eig[i] > -1e-7);
    }
    // flux populations frozen when the flux qubit has no decay channel
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(std::abs(ts.pop_g[i] - 1.0) < 1e-8);
        CHECK(std::abs(ts.pop_e[i]) < 1e-8);
    }
}

TEST_CASE("short pulse, flux |e>: reflection dominates further off resonance") {
    SampleGrid grid;
    grid.samples = 4000;
    PulseSpec pulse;
    pulse.tau_p = 500.0;
    const TimeSeries ts = evolve(fig_params(), pulse, flux_state(0.0, 1.0), grid);
    const FluxSeries fs = output_flux(ts, ts.params);
    CHECK_THAT(fs.e_r, WithinAbs(0.144860365, 2e-5));
    CHECK_THAT(fs.e_l, WithinAbs(0.855078833, 2e-5));
    CHECK(excitation_ledger_defect(ts, fs) < 1e-5);
}

TEST_CASE("cavity emptying follows the closed-form release integral") {
    // the cascade is unidirectional: nothing the emitter does feeds back, so
    // <a'a>(t) = exp(-Int_0^t kappa_c)
    SampleGrid grid;
    grid.samples = 400;
    PulseSpec pulse;
    pulse.tau_p = 300.0;
    const TimeSeries ts = evolve(fig_params(), pulse, flux_state(1.0, 0.0), grid);
    const double tau = pulse.tau_or_default(), sp = pulse.tau_p;
    for (std::size_t i = 0; i < ts.size(); i += 37) {
        const double t = ts.times[i];
        const double integral =
            pulse.peak * sp * std::sqrt(M_PI / 2.0)
            * (std::erf((t - tau) / (sp * std::sqrt(2.0)))
               + std::erf(tau / (sp * std::sqrt(2.0))));
        CHECK_THAT(ts.photon[i], WithinAbs(std::exp(-integral), 1e-6));
    }
}

TEST_CASE("without flux shifts the two flux states evolve identically") {
    SystemParams p = fig_params();
    p.eta1 = p.eta2 = p.eta3 = 0.0;
    p.delta2 = 0.0;
    SampleGrid grid;
    grid.samples = 300;
    PulseSpec pulse;
    pulse.tau_p = 200.0;
    const TimeSeries g = evolve(p, pulse, flux_state(1.0, 0.0), grid);
    const TimeSeries e = evolve(p, pulse, flux_state(0.0, 1.0), grid);
    const FluxSeries fg = output_flux(g, p), fe = output_flux(e, p);
    CHECK_THAT(fg.e_r, WithinAbs(fe.e_r, 1e-9));
    CHECK_THAT(fg.e_l, WithinAbs(fe.e_l, 1e-9));
    for (std::size_t i = 0; i < g.size(); i += 23)
        CHECK_THAT(g.s33[i], WithinAbs(e.s33[i], 1e-10));
}

TEST_CASE("flux relaxation empties |e> during the run") {
    SystemParams p = fig_params();
    p.gamma_f = 2e-3;
    SampleGrid grid;
    grid.samples = 300;
    PulseSpec pulse;
    pulse.tau_p = 200.0;
    const TimeSeries ts = evolve(p, pulse, flux_state(0.0, 1.0), grid);
    const double t_end = ts.times.back();
    CHECK_THAT(ts.pop_e.back(), WithinAbs(std::exp(-p.gamma_f * t_end), 1e-4));
    CHECK(ts.pop_g.back() > 0.9 * (1.0 - std::exp(-p.gamma_f * t_end)));
}

TEST_CASE("recorded moments reproduce the stored density matrices") {
    SystemParams p = fig_params();
    SampleGrid grid;
    grid.samples = 40;
    grid.store_rho = true;
    PulseSpec pulse;
    pulse.tau_p = 200.0;
    const double inv = 1.0 / std::sqrt(2.0);
    const TimeSeries ts = evolve(p, pulse, flux_state(inv, inv), grid);
    REQUIRE(ts.rho_samples.size() == ts.size());
    const PathQubitSeries pq = path_qubit_series(ts, p);
    for (std::size_t i = 0; i < ts.size(); i += 7) {
        DensityMatrix dm;
        dm.rho = ts.rho_samples[i];
        dm.time = ts.times[i];
        const Eigen::Matrix4cd direct = reduced_path_qubit(dm, p, ts.kappa[i]);
        CHECK((direct - pq.mats[i]).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("convergence under tolerance tightening") {
    SampleGrid coarse, fine;
    coarse.samples = fine.samples = 600;
    coarse.rtol = 1e-6;
    coarse.atol = 1e-9;
    fine.rtol = 1e-9;
    fine.atol = 1e-12;
    PulseSpec pulse;
    pulse.tau_p = 300.0;
    const TimeSeries a = evolve(fig_params(), pulse, flux_state(1.0, 0.0), coarse);
    const TimeSeries b = evolve(fig_params(), pulse, flux_state(1.0, 0.0), fine);
    const FluxSeries fa = output_flux(a, a.params), fb = output_flux(b, b.params);
    CHECK_THAT(fa.e_r, WithinAbs(fb.e_r, 1e-5));
    CHECK_THAT(fa.e_l, WithinAbs(fb.e_l, 1e-5));
    CHECK(b.stats.steps > a.stats.steps / 4);  // both did real work
}

TEST_CASE("grid validation") {
    SampleGrid grid;
    grid.samples = 1;
    PulseSpec pulse;
    CHECK_THROWS_AS(evolve(fig_params(), pulse, flux_state(1.0, 0.0), grid),
                    ConfigError);
}
