#include "outage/hover_plan_io.hpp"

#include "outage/csv.hpp"

namespace outage {

namespace {

nlohmann::json powers_dbm(const Eigen::VectorXd& p) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) {
      arr.push_back(watts_to_dbm(p[k]));
    } else {
      arr.push_back(nullptr);
    }
  }
  return arr;
}

nlohmann::json point(const Vec2& v) { return nlohmann::json::array({v.x(), v.y()}); }

}  // namespace

nlohmann::json hover_plan_to_json(const HoverPlan& plan) {
  nlohmann::json doc;
  auto clusters = nlohmann::json::array();
  for (const auto& c : plan.clusters) {
    nlohmann::json jc;
    jc["location"] = point(c.location);
    jc["duration_s"] = c.duration;
    auto members = nlohmann::json::array();
    for (int m : c.members) {
      const auto idx = static_cast<size_t>(m);
      members.push_back({{"location", point(plan.candidates[idx].location)},
                         {"powers_dbm", powers_dbm(plan.candidates[idx].powers)},
                         {"duration_s", plan.durations[idx]}});
    }
    jc["operating_points"] = std::move(members);
    clusters.push_back(std::move(jc));
  }
  doc["candidates"] = std::move(clusters);
  doc["outage_duration_s"] = plan.outage_duration;
  doc["horizon_s"] = plan.horizon;
  doc["outage_probability"] = plan.outage_probability;
  return doc;
}

nlohmann::json relaxed_solution_to_json(const RelaxedSolution& sol) {
  nlohmann::json doc = hover_plan_to_json(sol.plan);
  auto mu = nlohmann::json::array();
  for (Eigen::Index k = 0; k < sol.dual.mu.size(); ++k) mu.push_back(sol.dual.mu[k]);
  doc["dual"] = {{"value", sol.dual.value},
                 {"gap_bound", sol.dual.gap_bound},
                 {"iterations", sol.dual.iterations},
                 {"mu", std::move(mu)}};
  return doc;
}

void write_cost_map_csv(std::ostream& out, const DualPoint& mu, const Scenario& s,
                        const GainField& field) {
  CsvWriter csv(out);
  csv.header({"x", "y", "transmit_cost"});
  for (int i = 0; i < field.size(); ++i) {
    const Vec2& p = field.point(i);
    csv.field(p.x()).field(p.y()).field(transmit_cost(mu, field.gains().col(i), s));
    csv.end_row();
  }
}

}  // namespace outage
