#include <doctest.h>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "outage/scenario.hpp"
#include "outage/scenario_io.hpp"

using namespace outage;
using nlohmann::json;

TEST_SUITE("scenario") {

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(-60.0) == doctest::Approx(1e-9));
  CHECK(db_to_linear(-30.0) == doctest::Approx(1e-3));
  CHECK(watts_to_dbm(dbm_to_watts(27.5)) == doctest::Approx(27.5));
  CHECK(linear_to_db(db_to_linear(-12.0)) == doctest::Approx(-12.0));
}

TEST_CASE("paper scenario loads in SI units") {
  const Scenario s = fixtures::paper_scenario();
  CHECK(s.num_sensors() == 10);
  CHECK(s.altitude() == 50.0);
  CHECK(s.ref_gain() == doctest::Approx(1e-3));
  CHECK(s.noise_power() == doctest::Approx(1e-9));
  CHECK(s.noise_amplitude() == doctest::Approx(std::sqrt(1e-9)));
  CHECK(s.slots() == 128);
  CHECK(s.slot_length() == doctest::Approx(20.0 / 128));
  CHECK(s.max_step() == doctest::Approx(40.0 * 20.0 / 128));
  CHECK(s.power_budgets().isApproxToConstant(1.0, 1e-12));
  CHECK(s.sensors()[4].position == Vec2(94, 168));
}

TEST_CASE("json round trip") {
  const Scenario s = fixtures::paper_scenario();
  const Scenario t = load_scenario(scenario_to_json(s));
  CHECK(t.num_sensors() == s.num_sensors());
  CHECK(t.ref_gain() == doctest::Approx(s.ref_gain()));
  CHECK(t.noise_power() == doctest::Approx(s.noise_power()));
  CHECK(t.power_budgets().isApprox(s.power_budgets()));
  CHECK(t.finish() == s.finish());
}

TEST_CASE("invalid documents name the field") {
  json doc = scenario_to_json(fixtures::paper_scenario());
  const auto field_of = [](const json& d) {
    try {
      load_scenario(d);
    } catch (const InvalidScenario& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  json empty = doc;
  empty["sensors"] = json::array();
  CHECK(field_of(empty) == "sensors");

  json missing = doc;
  missing.erase("alpha");
  CHECK(field_of(missing) == "alpha");

  json bad_h = doc;
  bad_h["h_m"] = 0;
  CHECK(field_of(bad_h) == "h_m");

  json bad_n = doc;
  bad_n["n_slots"] = 2.5;
  CHECK(field_of(bad_n) == "n_slots");

  json short_t = doc;
  short_t["t_s"] = 5;  // 200 sqrt(2) / 40 > 7 s
  CHECK(field_of(short_t) == "t_s");

  json bad_sensor = doc;
  bad_sensor["sensors"][3].erase("y");
  CHECK(field_of(bad_sensor) == "sensors[3].y");

  CHECK_THROWS_AS(load_scenario_text("{not json"), InvalidScenario);
}

TEST_CASE("modified copies are validated") {
  const Scenario s = fixtures::paper_scenario();
  CHECK(s.with_slots(32).slots() == 32);
  CHECK(s.with_duration(40, 64).slot_length() == doctest::Approx(40.0 / 64));
  CHECK_THROWS_AS(s.with_duration(1.0, 8), InvalidScenario);
  CHECK_THROWS_AS(s.with_uniform_budget(-1.0), InvalidScenario);
  CHECK(s.with_uniform_budget(0.0).power_budgets().isZero());
}

TEST_CASE("direct trajectory and uniform powers") {
  const Scenario s = fixtures::paper_scenario().with_slots(10);
  const Trajectory tr = direct_trajectory(s);
  REQUIRE(tr.slots() == 10);
  CHECK(tr.waypoints.front() == s.start());
  CHECK(tr.waypoints.back() == s.finish());
  for (int i = 1; i <= 10; ++i) {
    CHECK((tr.waypoints[i] - tr.waypoints[i - 1]).norm() ==
          doctest::Approx((s.finish() - s.start()).norm() / 10));
  }
  const PowerSchedule ps = PowerSchedule::uniform(s);
  CHECK(validate_plan(s, tr, ps).feasible());
}

TEST_CASE("validate_plan reports each violated constraint") {
  const Scenario s = fixtures::paper_scenario().with_slots(10);
  Trajectory tr = direct_trajectory(s);
  PowerSchedule ps = PowerSchedule::uniform(s);

  SUBCASE("speed") {
    tr.waypoints[5] += Vec2(60.0, -60.0);
    const auto v = validate_plan(s, tr, ps).violations();
    REQUIRE(v.size() == 2);
    CHECK(v[0].kind == ConstraintKind::kSpeed);
    CHECK(v[0].index == 5);
    CHECK(v[1].index == 6);
  }
  SUBCASE("endpoints") {
    tr.waypoints.back() += Vec2(1e-3, 0.0);
    const auto v = validate_plan(s, tr, ps).violations();
    REQUIRE_FALSE(v.empty());
    CHECK(v.back().kind == ConstraintKind::kFinish);
  }
  SUBCASE("budget") {
    ps.powers(2, 0) *= 1.0 + 1e-6;
    const auto v = validate_plan(s, tr, ps).violations();
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ConstraintKind::kAveragePower);
    CHECK(v[0].index == 3);
  }
  SUBCASE("sign") {
    ps.powers(0, 0) = -1e-3;
    const auto v = validate_plan(s, tr, ps).violations();
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ConstraintKind::kNonNegativePower);
  }
  SUBCASE("budget met with equality is feasible") {
    ps.powers.row(1).setZero();
    ps.powers(1, 3) = 10.0 * s.sensors()[1].avg_power_budget;
    CHECK(validate_plan(s, tr, ps).feasible());
  }
  SUBCASE("size mismatch") {
    ps.powers.conservativeResize(10, 9);
    CHECK_THROWS_AS(validate_plan(s, tr, ps), DimensionMismatch);
  }
}

}
