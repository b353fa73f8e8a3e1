#include <doctest.h>

#include <cmath>

#include "enrichsim/config.hpp"

using namespace enrichsim;

TEST_SUITE("config") {

TEST_CASE("parse, defaults, and canonical round trip") {
  const Config cfg = Config::parse_string(
      "# example\n"
      "design.alpha = 0.025\n"
      "scenario.hr_f = 0.6   # trailing comment\n"
      "run.replications = 500\n"
      "futility.enabled = true\n");
  CHECK(cfg.get_double("design.alpha") == 0.025);
  CHECK(cfg.get_double("scenario.hr_f") == 0.6);
  CHECK(cfg.get_long("run.replications") == 500);
  CHECK(cfg.get_bool("futility.enabled"));
  CHECK(cfg.get_double("missing.key", 7.0) == 7.0);

  const Config back = Config::parse_string(cfg.canonical_text());
  CHECK(back.canonical_text() == cfg.canonical_text());
  CHECK(back.entries() == cfg.entries());
}

TEST_CASE("diagnostics carry the line number and key") {
  CHECK_THROWS_WITH_AS(
      static_cast<void>(Config::parse_string("a = 1\nbroken line\n", "f.cfg")),
      doctest::Contains("f.cfg:2"), ConfigError);
  CHECK_THROWS_WITH_AS(
      static_cast<void>(Config::parse_string("a = 1\na = 2\n", "f.cfg")),
      doctest::Contains("duplicate"), ConfigError);
  const Config cfg = Config::parse_string("x = abc\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(cfg.get_double("x")),
                       doctest::Contains("x"), ConfigError);
  CHECK_THROWS_WITH_AS(static_cast<void>(cfg.get_double("nope")),
                       doctest::Contains("nope"), ConfigError);
}

TEST_CASE("scenario and design readers validate") {
  const Config cfg = Config::parse_string(
      "scenario.hr_f = 0.7\nscenario.hr_s = 0.6\nscenario.theta_f = 0.2\n"
      "scenario.theta_s = 0.3\nscenario.rho = -0.9\n"
      "design.cohort1_size = 80\nvariant = W2\n");
  const Scenario sc = scenario_from_config(cfg);
  CHECK(sc.hr_f == 0.7);
  CHECK(sc.rho == -0.9);
  CHECK(sc.control_median == 14.0);  // default
  const DesignSpec d = design_from_config(cfg);
  CHECK(d.cohort1_size == 80);
  CHECK(d.variant == SurrogateWeighting::HarmonicInfo);
  CHECK(d.thresholds.favorable == 0.9);

  const Config bad = Config::parse_string("scenario.hr_f = -1\n");
  CHECK_THROWS(static_cast<void>(scenario_from_config(bad)));
}

TEST_CASE("grid expansion by set letters and filters") {
  const Config cfg = Config::parse_string(
      "grid.sets = a,d\nrun.replications = 100\nrun.variants = none, W1\n");
  const ScenarioGrid g = grid_from_config(cfg);
  CHECK(g.items.size() == 18);
  CHECK(g.replications == 100);
  REQUIRE(g.variants.size() == 2);
  CHECK(g.variants[0] == SurrogateWeighting::None);
  CHECK(g.variants[1] == SurrogateWeighting::LinearBlend);

  const Config filtered = Config::parse_string(
      "grid.sets = d\ngrid.phi = 0.2\ngrid.rho = -0.9\n");
  const ScenarioGrid f = grid_from_config(filtered);
  REQUIRE(f.items.size() == 1);
  CHECK(f.items[0].scenario.hr_f == 0.8);
  CHECK(f.items[0].scenario.phi == 0.2);

  const Config null_cfg = Config::parse_string("grid.null = true\n");
  CHECK(grid_from_config(null_cfg).items.size() == 3);

  CHECK_THROWS_AS(static_cast<void>(grid_from_config(
                      Config::parse_string("grid.sets = z\n"))),
                  ConfigError);
}

TEST_CASE("interim case reader") {
  const Config cfg = Config::parse_string(
      "variant = W1\n"
      "design.d_total_planned = 160\n"
      "interim.cap_total = 224\n"
      "interim.t = 0.375\n"
      "interim.m_f = 40\ninterim.m_s = 15\n"
      "interim.z_f = -0.05\ninterim.z_s = 0.27\n"
      "interim.predicted_f = 0.09\ninterim.predicted_s = -1.73\n");
  const InterimCase c = interim_from_config(cfg);
  CHECK(c.snapshot.full.z1 == doctest::Approx(0.05));
  CHECK(c.snapshot.subgroup.z1 == doctest::Approx(-0.27));
  CHECK(c.snapshot.subgroup.predicted == doctest::Approx(1.73));
  CHECK(c.snapshot.subgroup.counts.n1 == 15.0);
  CHECK(c.snapshot.subgroup.planned_incr == 145);
  CHECK(c.snapshot.subgroup.cap_incr == 209);
  CHECK(c.decision.variant == SurrogateWeighting::LinearBlend);

  // a historical model replaces direct predictions
  const Config with_model = Config::parse_string(
      "variant = W1\ninterim.t = 0.3\n"
      "interim.m_f = 26\ninterim.m_s = 20\n"
      "design.d_total_planned = 92\ninterim.cap_total = 112\n"
      "interim.z_f = -0.8562\ninterim.z_s = -1.0398\n"
      "model.intercept = 0.018\nmodel.slope = 1.5588\n"
      "surrogate.theta_f = 1.2\nsurrogate.theta_s = 1.5\n");
  const InterimCase v = interim_from_config(with_model);
  CHECK(v.snapshot.full.predicted == doctest::Approx(0.018 + 1.2 * 1.5588));
  CHECK(v.snapshot.subgroup.predicted == doctest::Approx(0.018 + 1.5 * 1.5588));

  // missing fields are enumerated
  CHECK_THROWS_WITH_AS(
      static_cast<void>(interim_from_config(
          Config::parse_string("variant = W1\ninterim.m_f = 40\n"))),
      doctest::Contains("interim.z_f"), ConfigError);
}

}  // TEST_SUITE
