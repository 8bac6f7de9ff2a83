#include "outage/scenario.hpp"

#include <cmath>
#include <string>

namespace outage {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

namespace {

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw InvalidScenario(field, message);
}

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

void check_spec(const ScenarioSpec& s) {
  require(!s.sensors.empty(), "sensors", "at least one sensor is required");
  for (size_t i = 0; i < s.sensors.size(); ++i) {
    const auto& site = s.sensors[i];
    const std::string where = "sensors[" + std::to_string(i) + "]";
    if (site.id != static_cast<int>(i) + 1) {
      throw InvalidScenario(where + ".id", "ids must be unique and contiguous from 1");
    }
    if (!finite(site.position)) throw InvalidScenario(where + ".position", "must be finite");
    if (!(site.avg_power_budget >= 0.0) || !std::isfinite(site.avg_power_budget)) {
      throw InvalidScenario(where + ".p_ave", "average power budget must be non-negative");
    }
  }
  require(s.altitude > 0.0 && std::isfinite(s.altitude), "h_m", "altitude must be positive");
  require(s.ref_gain > 0.0 && std::isfinite(s.ref_gain), "beta0_db", "reference gain must be positive");
  require(s.path_loss_exp >= 2.0 && std::isfinite(s.path_loss_exp), "alpha",
          "path-loss exponent must be at least 2");
  require(s.noise_power > 0.0 && std::isfinite(s.noise_power), "noise_dbm",
          "noise power must be positive");
  require(s.snr_threshold > 0.0 && std::isfinite(s.snr_threshold), "gamma_min",
          "SNR threshold must be positive");
  require(s.v_max > 0.0 && std::isfinite(s.v_max), "vmax_mps", "maximum speed must be positive");
  require(s.duration > 0.0 && std::isfinite(s.duration), "t_s", "duration must be positive");
  require(s.slots > 0, "n_slots", "slot count must be positive");
  require(finite(s.start), "q_i", "must be finite");
  require(finite(s.finish), "q_f", "must be finite");
  const double needed = (s.finish - s.start).norm() / s.v_max;
  require(s.duration >= needed - feasibility_slack(s.duration, needed), "t_s",
          "duration " + std::to_string(s.duration) + " s is below the minimum flight time " +
              std::to_string(needed) + " s");
}

}  // namespace

Scenario::Scenario(ScenarioSpec spec)
    : spec_(std::move(spec)), noise_amplitude_(std::sqrt(spec_.noise_power)) {}

Scenario Scenario::create(ScenarioSpec spec) {
  check_spec(spec);
  return Scenario(std::move(spec));
}

double Scenario::min_flight_time() const noexcept {
  return (spec_.finish - spec_.start).norm() / spec_.v_max;
}

Eigen::VectorXd Scenario::power_budgets() const {
  Eigen::VectorXd b(num_sensors());
  for (int k = 0; k < num_sensors(); ++k) b[k] = spec_.sensors[k].avg_power_budget;
  return b;
}

Scenario Scenario::with_duration(double duration, int slots) const {
  ScenarioSpec s = spec_;
  s.duration = duration;
  s.slots = slots;
  return create(std::move(s));
}

Scenario Scenario::with_slots(int slots) const { return with_duration(spec_.duration, slots); }

Scenario Scenario::with_uniform_budget(double watts) const {
  ScenarioSpec s = spec_;
  for (auto& site : s.sensors) site.avg_power_budget = watts;
  return create(std::move(s));
}

Scenario Scenario::with_snr_threshold(double gamma) const {
  ScenarioSpec s = spec_;
  s.snr_threshold = gamma;
  return create(std::move(s));
}

PowerSchedule PowerSchedule::uniform(const Scenario& s) {
  PowerSchedule ps = zeros(s.num_sensors(), s.slots());
  for (int k = 0; k < s.num_sensors(); ++k) ps.powers.row(k).setConstant(s.sensors()[k].avg_power_budget);
  return ps;
}

Trajectory direct_trajectory(const Scenario& s) {
  Trajectory tr;
  tr.slot_length = s.slot_length();
  const int n = s.slots();
  tr.waypoints.reserve(static_cast<size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double f = static_cast<double>(i) / n;
    tr.waypoints.push_back(s.start() + f * (s.finish() - s.start()));
  }
  tr.waypoints.back() = s.finish();
  return tr;
}

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kSpeed: return "speed";
    case ConstraintKind::kStart: return "start";
    case ConstraintKind::kFinish: return "finish";
    case ConstraintKind::kAveragePower: return "average_power";
    case ConstraintKind::kNonNegativePower: return "non_negative_power";
  }
  return "unknown";
}

std::vector<ConstraintResidual> PlanCheck::violations() const {
  std::vector<ConstraintResidual> out;
  for (const auto& r : residuals) {
    if (r.violated()) out.push_back(r);
  }
  return out;
}

bool PlanCheck::feasible() const {
  for (const auto& r : residuals) {
    if (r.violated()) return false;
  }
  return true;
}

PlanCheck validate_plan(const Scenario& s, const Trajectory& tr, const PowerSchedule& ps) {
  const int n = s.slots();
  if (tr.slots() != n) {
    throw DimensionMismatch("trajectory has " + std::to_string(tr.slots()) + " slots, scenario has " +
                            std::to_string(n));
  }
  if (ps.slots() != n || ps.num_sensors() != s.num_sensors()) {
    throw DimensionMismatch("power schedule is " + std::to_string(ps.num_sensors()) + "x" +
                            std::to_string(ps.slots()) + ", expected " +
                            std::to_string(s.num_sensors()) + "x" + std::to_string(n));
  }

  PlanCheck check;
  auto& res = check.residuals;
  res.reserve(static_cast<size_t>(n + 2 + 2 * s.num_sensors()));
  const double step = s.max_step();
  for (int i = 1; i <= n; ++i) {
    res.push_back({ConstraintKind::kSpeed, i, (tr.waypoints[i] - tr.waypoints[i - 1]).norm(), step});
  }
  // Endpoint residuals compare the offset against zero, scaled by the
  // coordinate magnitude so that the relative tolerance is meaningful.
  const double start_scale = std::max(1.0, s.start().norm());
  const double finish_scale = std::max(1.0, s.finish().norm());
  res.push_back({ConstraintKind::kStart, 0, start_scale + (tr.waypoints.front() - s.start()).norm(),
                 start_scale});
  res.push_back({ConstraintKind::kFinish, n, finish_scale + (tr.waypoints.back() - s.finish()).norm(),
                 finish_scale});
  for (int k = 0; k < s.num_sensors(); ++k) {
    res.push_back({ConstraintKind::kAveragePower, k + 1, ps.powers.row(k).sum() / n,
                   s.sensors()[k].avg_power_budget});
    res.push_back({ConstraintKind::kNonNegativePower, k + 1, -ps.powers.row(k).minCoeff(), 0.0});
  }
  return check;
}

}  // namespace outage
