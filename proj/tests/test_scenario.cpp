#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <string>

#include <qrouter/scenario.hpp>

using namespace qrouter;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string presets_dir() {
    const char* env = std::getenv("QROUTER_PRESETS");
    REQUIRE(env != nullptr);
    return std::string(env);
}

Scenario tiny_scenario() {
    Json j = Json::object();
    j["name"] = "tiny";
    j["params"] = {{"delta1", 0.0}, {"delta2", 2e-3}, {"eta1", 1e-3},
                   {"eta2", 1e-3},  {"eta3", 1e-3},   {"omega_c", 0.03}};
    j["pulse"] = {{"tau_p", 200.0}};
    j["flux"] = {{"alpha", 0.7071067811865476}, {"beta", 0.7071067811865476}};
    j["grid"] = {{"samples", 120}, {"rtol", 1e-7}, {"atol", 1e-10}};
    return parse_scenario(j);
}

}  // namespace

TEST_CASE("all shipped presets parse and validate") {
    const std::string dir = presets_dir();
    for (const char* name : {"fig3", "fig4a", "fig4b", "fig4c", "fig5",
                             "experimental"}) {
        INFO("preset " << name);
        CHECK_NOTHROW(load_scenario(dir + "/" + name + ".json"));
    }
}

TEST_CASE("preset spot checks") {
    const std::string dir = presets_dir();
    const Scenario a = load_scenario(dir + "/fig4a.json");
    CHECK(a.flux.alpha == 1.0);
    CHECK(a.flux.beta == 0.0);
    const Scenario c = load_scenario(dir + "/fig4c.json");
    CHECK_THAT(c.flux.alpha, WithinAbs(1.0 / std::sqrt(2.0), 1e-12));
    CHECK_THAT(c.flux.beta, WithinAbs(1.0 / std::sqrt(2.0), 1e-12));
    const Scenario s = load_scenario(dir + "/fig5.json");
    REQUIRE(s.sweep.has_value());
    CHECK(s.sweep->parameter == "params.gamma_star");
    CHECK(s.sweep->values.size() == 8);
    CHECK(s.sweep->values.front() == 0.0);
    CHECK_THAT(s.sweep->values.back(), WithinRel(1e-3, 1e-12));
    const Scenario w = load_scenario(dir + "/fig3.json");
    CHECK(w.scan.grid().size() == 481);
    CHECK_THAT(w.scan.grid().front(), WithinAbs(-6e-3, 1e-15));
    CHECK_THAT(w.scan.grid().back(), WithinAbs(6e-3, 1e-15));
}

TEST_CASE("laboratory units convert against the waveguide anchor") {
    const Scenario s = load_scenario(presets_dir() + "/experimental.json");
    CHECK_THAT(s.params.gamma_star, WithinRel(181.0 / 3.0e8, 1e-12));
    CHECK_THAT(s.pulse.tau_p,
               WithinRel(3.0e-5 * 2.0 * M_PI * 3.0e8, 1e-12));
    CHECK_THAT(s.params.gamma2, WithinAbs(0.1, 1e-12));
    CHECK_THAT(s.params.xi_2, WithinAbs(1.0 / 2.1, 1e-12));
}

TEST_CASE("serialization round trip is stable") {
    for (const char* name : {"fig4c", "fig5", "experimental"}) {
        INFO("preset " << name);
        const Scenario s1 = load_scenario(presets_dir() + "/"
                                          + std::string(name) + ".json");
        const Json j1 = scenario_to_json(s1);
        const Scenario s2 = parse_scenario(j1);
        const Json j2 = scenario_to_json(s2);
        CHECK(j1.dump() == j2.dump());
    }
}

TEST_CASE("unknown keys are rejected with their field path") {
    Json j = Json::object();
    j["params"] = {{"bogus", 1.0}};
    CHECK_THROWS_WITH(parse_scenario(j), ContainsSubstring("params.bogus"));
    Json j2 = Json::object();
    j2["nonsense"] = 1;
    CHECK_THROWS_AS(parse_scenario(j2), ConfigError);
}

TEST_CASE("a rate given in both unit systems is ambiguous") {
    Json j = Json::object();
    j["params"] = {{"gamma_star", 1e-4}, {"gamma_star_hz", 181.0}};
    CHECK_THROWS_AS(parse_scenario(j), ConfigError);
}

TEST_CASE("sweep paths are checked at parse time") {
    Json j = Json::object();
    j["sweep"] = {{"parameter", "params.nope"}, {"values", {1.0}}};
    CHECK_THROWS_WITH(parse_scenario(j), ContainsSubstring("params.nope"));
    Json j2 = Json::object();
    j2["sweep"] = {{"parameter", "params.gamma_star"},
                   {"values", Json::array()}};
    CHECK_THROWS_AS(parse_scenario(j2), ConfigError);
}

TEST_CASE("either branching field derives the other") {
    Json j = Json::object();
    j["params"] = {{"gamma2", 0.5}};
    Scenario s = parse_scenario(j);
    CHECK_THAT(s.params.xi_2, WithinAbs(1.0 / 2.5, 1e-12));

    Json j2 = Json::object();
    j2["params"] = {{"xi_2", 0.4}};
    Scenario s2 = parse_scenario(j2);
    CHECK_THAT(s2.params.gamma2, WithinAbs(0.5, 1e-12));
}

TEST_CASE("conflicting branching fields are rejected") {
    Json j = Json::object();
    j["params"] = {{"gamma2", 0.5}, {"xi_2", 0.5}};  // 0.5 implies gamma2 = 0
    CHECK_THROWS_AS(parse_scenario(j), ConfigError);
}

TEST_CASE("sweep targets write through to the scenario") {
    Scenario s = tiny_scenario();
    *sweep_target(s, "params.gamma_star") = 3e-4;
    CHECK(s.params.gamma_star == 3e-4);
    *sweep_target(s, "flux.theta") = 0.25;
    CHECK(s.flux.theta == 0.25);
    CHECK_THROWS_AS(sweep_target(s, "grid.samples"), ConfigError);
}

TEST_CASE("sweep rows survive per-row failures") {
    Scenario s = tiny_scenario();
    SweepSpec sw;
    sw.parameter = "flux.alpha";
    sw.values = {0.7071067811865476, 1.5};  // second breaks normalization
    s.sweep = sw;
    const auto rows = run_sweep(s, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ok);
    // the short pulse leaves ~1% parked in the dark state at t_end
    CHECK_THAT(rows[0].e_r + rows[0].e_l, WithinAbs(1.0, 0.02));
    CHECK_FALSE(rows[1].ok);
    CHECK_FALSE(rows[1].error.empty());
    CHECK(rows[1].value == 1.5);
}

TEST_CASE("pipeline runs a small balanced scenario end to end") {
    const Scenario s = tiny_scenario();
    const PipelineResult r = run_pipeline(s);
    // everything emitted plus the truncation tail accounts for the photon
    CHECK_THAT(r.report.e_r + r.report.e_l + r.report.truncation_tail,
               WithinAbs(1.0, 1e-4));
    CHECK(r.report.fidelity_max > 0.2);
    CHECK(r.report.fidelity_max <= 1.0 + 1e-9);
    CHECK(r.report.concurrence > 0.0);
    CHECK_THAT(r.herald_report.total_weight,
               WithinAbs(r.report.e_r + r.report.e_l, 1e-9));
}
