#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "outage/scenario.hpp"

namespace outage {

/// Linear received SNR. Non-negative and finite by construction.
class SnrValue {
 public:
  SnrValue() = default;
  explicit SnrValue(double v);
  double value() const noexcept { return value_; }
  friend bool operator==(SnrValue, SnrValue) = default;

 private:
  double value_ = 0.0;
};

/// UAV-to-sensor distance sqrt(||q - S_k||^2 + H^2).
double distance(const Vec2& q, const SensorSite& sensor, double altitude);

/// LoS power gain beta0 * d^-alpha.
double channel_gain(const Vec2& q, const SensorSite& sensor, const Scenario& s);

/// Gains of every sensor at `q`.
Eigen::VectorXd channel_gains(const Vec2& q, const Scenario& s);

/// Coherent-combining SNR with phases aligned:
/// (sum_k sqrt(P_k * g_k))^2 / sigma^2.
SnrValue snr(const Vec2& q, std::span<const double> powers, const Scenario& s);
SnrValue snr(const Vec2& q, const Eigen::VectorXd& powers, const Scenario& s);

/// Same, from precomputed gains.
SnrValue snr_from_gains(const Eigen::VectorXd& gains, const Eigen::VectorXd& powers,
                        double noise_power);

/// 1 when the link is in outage (v < gamma), 0 otherwise. Exact comparison.
int outage_indicator(SnrValue v, double gamma);

/// Per-slot SNRs of a discrete plan (0-based slots).
std::vector<double> slot_snrs(const Trajectory& tr, const PowerSchedule& ps, const Scenario& s);

/// Fraction of slots in outage. Throws DimensionMismatch on size errors.
double outage_probability(const Trajectory& tr, const PowerSchedule& ps, const Scenario& s);

}  // namespace outage
