#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "outage/scenario.hpp"

namespace outage {

// JSON scenario documents:
//
//   {"sensors": [{"x": 20, "y": 10, "p_ave_dbm": 30}, ...],
//    "h_m": 50, "beta0_db": -30, "alpha": 2.8, "noise_dbm": -60,
//    "gamma_min": 550, "vmax_mps": 40, "t_s": 20, "n_slots": 128,
//    "q_i": [0, 0], "q_f": [200, 200]}
//
// Every field is required. Errors throw InvalidScenario naming the field.

Scenario load_scenario(const nlohmann::json& doc);
Scenario load_scenario_text(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Inverse of load_scenario (budgets in dBm, gains in dB).
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace outage
