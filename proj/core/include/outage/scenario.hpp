#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace outage {

using Vec2 = Eigen::Vector2d;

// Relative feasibility tolerance shared by every constraint check, with an
// absolute floor for quantities near zero.
inline constexpr double kFeasibilityRelTol = 1e-9;
inline constexpr double kFeasibilityAbsTol = 1e-12;

/// Tolerance applied when comparing `lhs <= rhs`.
inline double feasibility_slack(double lhs, double rhs) {
  return kFeasibilityRelTol * std::max(std::abs(lhs), std::abs(rhs)) + kFeasibilityAbsTol;
}

// Unit conversions. Configuration files carry dB / dBm; everything past the
// loader is linear SI.
double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Raised for any invalid scenario; `field()` names the offending entry.
class InvalidScenario : public std::invalid_argument {
 public:
  InvalidScenario(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct SensorSite {
  int id = 0;  // 1-based, contiguous
  Vec2 position = Vec2::Zero();
  double avg_power_budget = 0.0;  // watts
};

/// Plain, unvalidated description of a problem instance in linear SI units.
/// Turn it into a `Scenario` with `Scenario::create`.
struct ScenarioSpec {
  std::vector<SensorSite> sensors;
  double altitude = 0.0;        // H, meters
  double ref_gain = 0.0;        // beta0, linear power gain at 1 m
  double path_loss_exp = 0.0;   // alpha
  double noise_power = 0.0;     // sigma^2, watts
  double snr_threshold = 0.0;   // gamma_min, linear
  double v_max = 0.0;           // m/s
  double duration = 0.0;        // T, seconds
  Vec2 start = Vec2::Zero();    // q_I
  Vec2 finish = Vec2::Zero();   // q_F
  int slots = 0;                // N
};

/// Immutable, validated problem instance.
///
/// Sensor budgets may be zero when built programmatically (a degenerate but
/// well-defined instance); the JSON loader can only produce positive budgets
/// because it reads them in dBm.
class Scenario {
 public:
  static Scenario create(ScenarioSpec spec);

  const ScenarioSpec& spec() const noexcept { return spec_; }
  const std::vector<SensorSite>& sensors() const noexcept { return spec_.sensors; }
  int num_sensors() const noexcept { return static_cast<int>(spec_.sensors.size()); }
  double altitude() const noexcept { return spec_.altitude; }
  double ref_gain() const noexcept { return spec_.ref_gain; }
  double path_loss_exp() const noexcept { return spec_.path_loss_exp; }
  double noise_power() const noexcept { return spec_.noise_power; }
  double noise_amplitude() const noexcept { return noise_amplitude_; }
  double snr_threshold() const noexcept { return spec_.snr_threshold; }
  double v_max() const noexcept { return spec_.v_max; }
  double duration() const noexcept { return spec_.duration; }
  const Vec2& start() const noexcept { return spec_.start; }
  const Vec2& finish() const noexcept { return spec_.finish; }
  int slots() const noexcept { return spec_.slots; }
  double slot_length() const noexcept { return spec_.duration / spec_.slots; }
  /// Maximum distance covered in one slot.
  double max_step() const noexcept { return spec_.v_max * slot_length(); }
  /// Shortest possible mission time, ||q_F - q_I|| / V_max.
  double min_flight_time() const noexcept;

  Eigen::VectorXd power_budgets() const;

  // Modified copies, re-validated.
  Scenario with_duration(double duration, int slots) const;
  Scenario with_slots(int slots) const;
  Scenario with_uniform_budget(double watts) const;
  Scenario with_snr_threshold(double gamma) const;

 private:
  explicit Scenario(ScenarioSpec spec);

  ScenarioSpec spec_;
  double noise_amplitude_ = 0.0;
};

/// UAV waypoints q[0..N]; slot n (1-based) is served from q[n].
struct Trajectory {
  std::vector<Vec2> waypoints;
  double slot_length = 0.0;

  int slots() const noexcept { return static_cast<int>(waypoints.size()) - 1; }
  /// Position used for 0-based slot `j`.
  const Vec2& slot_position(int j) const { return waypoints[static_cast<size_t>(j) + 1]; }
};

/// K x N transmit powers in watts; column j is 0-based slot j.
struct PowerSchedule {
  Eigen::MatrixXd powers;

  int num_sensors() const noexcept { return static_cast<int>(powers.rows()); }
  int slots() const noexcept { return static_cast<int>(powers.cols()); }

  static PowerSchedule zeros(int sensors, int slots) {
    return {Eigen::MatrixXd::Zero(sensors, slots)};
  }
  static PowerSchedule uniform(const Scenario& s);
};

/// Constant-speed straight flight from q_I to q_F.
Trajectory direct_trajectory(const Scenario& s);

enum class ConstraintKind { kSpeed, kStart, kFinish, kAveragePower, kNonNegativePower };

const char* to_string(ConstraintKind kind);

/// Signed residual `lhs - rhs` of one constraint `lhs <= rhs`.
struct ConstraintResidual {
  ConstraintKind kind;
  int index = 0;  // slot (1-based) for speed, sensor (1-based) for power
  double lhs = 0.0;
  double rhs = 0.0;
  double value() const noexcept { return lhs - rhs; }
  bool violated() const noexcept { return value() > feasibility_slack(lhs, rhs); }
};

struct PlanCheck {
  std::vector<ConstraintResidual> residuals;

  std::vector<ConstraintResidual> violations() const;
  bool feasible() const;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Residuals for the speed, endpoint, average-power and non-negativity
/// constraints of a discrete plan. Throws DimensionMismatch on size errors.
PlanCheck validate_plan(const Scenario& s, const Trajectory& tr, const PowerSchedule& ps);

}  // namespace outage
