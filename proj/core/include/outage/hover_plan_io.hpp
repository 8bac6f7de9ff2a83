#pragma once

#include <ostream>

#include <nlohmann/json.hpp>

#include "outage/relaxed.hpp"

namespace outage {

/// Hover plan as JSON. Powers are in dBm, null where a sensor is silent.
/// `candidates` lists the hover clusters; each carries its operating points.
nlohmann::json hover_plan_to_json(const HoverPlan& plan);

/// Full relaxed result: dual value, prices and the plan.
nlohmann::json relaxed_solution_to_json(const RelaxedSolution& sol);

/// Transmit-cost map `x,y,transmit_cost` over the grid for prices `mu`.
void write_cost_map_csv(std::ostream& out, const DualPoint& mu, const Scenario& s,
                        const GainField& field);

}  // namespace outage
