#include <catch2/catch_amalgamated.hpp>

#include <qrouter/params.hpp>

using namespace qrouter;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("default parameter set validates") {
    SystemParams p;
    CHECK_NOTHROW(p.validate());
    CHECK_THAT(p.gamma2_total(), WithinAbs(2.0, 0.0));
    PulseSpec pulse;
    CHECK_NOTHROW(pulse.validate());
    CHECK_THAT(pulse.tau_or_default(), WithinAbs(5.5e4, 1e-9));
    FluxQubitConfig flux;
    CHECK_NOTHROW(flux.validate());
}

TEST_CASE("rate validation rejects out-of-range values") {
    SystemParams p;
    SECTION("negative decay") {
        p.gamma1 = -0.1;
        CHECK_THROWS_AS(p.validate(), ConfigError);
    }
    SECTION("xi_c above 1") {
        p.xi_c = 1.5;
        CHECK_THROWS_AS(p.validate(), ConfigError);
    }
    SECTION("xi_2 above the physical branching bound") {
        p.xi_2 = 0.6;
        CHECK_THROWS_AS(p.validate(), ConfigError);
    }
    SECTION("xi_2 and gamma2 must describe the same branching") {
        p.gamma2 = 0.1;  // requires xi_2 = 1/2.1
        CHECK_THROWS_AS(p.validate(), ConfigError);
        p.xi_2 = 1.0 / 2.1;
        CHECK_NOTHROW(p.validate());
        CHECK_THAT(p.gamma2_total(), WithinAbs(2.1, 1e-12));
    }
    SECTION("non-finite entry") {
        p.delta2 = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(p.validate(), ConfigError);
    }
}

TEST_CASE("pulse validation") {
    PulseSpec pulse;
    pulse.tau_p = 0.0;
    CHECK_THROWS_AS(pulse.validate(), ConfigError);
    pulse.tau_p = 100.0;
    pulse.tau = 321.0;
    CHECK_NOTHROW(pulse.validate());
    CHECK_THAT(pulse.tau_or_default(), WithinAbs(321.0, 0.0));
}

TEST_CASE("flux preparation must be normalized") {
    FluxQubitConfig f;
    f.alpha = 0.6;
    f.beta = 0.8;
    CHECK_NOTHROW(f.validate());
    f.beta = 0.9;
    CHECK_THROWS_AS(f.validate(), ConfigError);
    f.alpha = -0.6;
    f.beta = 0.8;
    CHECK_THROWS_AS(f.validate(), ConfigError);
}

TEST_CASE("physical-unit conversions round-trip through the anchor") {
    const double anchor = 3e8;
    for (double rate : {1e-7, 2.5e-3, 0.5, 181.0 / 3e8})
        CHECK_THAT(rate_from_hz(hz_from_rate(rate, anchor), anchor),
                   WithinRel(rate, 1e-12));
    for (double sec : {3e-5, 1e-9, 2.0})
        CHECK_THAT(seconds_from_time(time_from_seconds(sec, anchor), anchor),
                   WithinRel(sec, 1e-12));
    // 181 Hz dephasing against a 300 MHz waveguide rate
    CHECK_THAT(rate_from_hz(181.0, anchor), WithinRel(6.0333333333333e-7, 1e-10));
    // a 30 us pulse in waveguide time units
    CHECK_THAT(time_from_seconds(3e-5, anchor), WithinRel(5.654866776461628e4, 1e-12));
}
