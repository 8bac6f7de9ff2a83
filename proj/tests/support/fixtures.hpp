#pragma once

#include <string>

#include "outage/scenario.hpp"
#include "outage/scenario_io.hpp"

#ifndef OUTAGE_SCENARIO_DIR
#error "OUTAGE_SCENARIO_DIR must point at scenarios/"
#endif

namespace fixtures {

inline outage::Scenario paper_scenario() {
  return outage::load_scenario_file(std::string(OUTAGE_SCENARIO_DIR) + "/paper.json");
}

/// Paper scenario with all budgets at `dbm`, horizon T and N slots.
inline outage::Scenario paper_scenario(double dbm, double t, int n) {
  return paper_scenario().with_uniform_budget(outage::dbm_to_watts(dbm)).with_duration(t, n);
}

/// One sensor at `at`, paper constants otherwise.
inline outage::Scenario one_sensor(const outage::Vec2& at, double dbm, double t = 10.0,
                                   int n = 8, outage::Vec2 start = {0, 0},
                                   outage::Vec2 finish = {100, 0}) {
  outage::ScenarioSpec spec;
  spec.sensors = {{1, at, outage::dbm_to_watts(dbm)}};
  spec.altitude = 50.0;
  spec.ref_gain = 1e-3;
  spec.path_loss_exp = 2.8;
  spec.noise_power = 1e-9;
  spec.snr_threshold = 550.0;
  spec.v_max = 40.0;
  spec.duration = t;
  spec.slots = n;
  spec.start = start;
  spec.finish = finish;
  return outage::Scenario::create(spec);
}

}  // namespace fixtures
