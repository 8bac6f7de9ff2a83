#include "outage/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace outage {

SnrValue::SnrValue(double v) : value_(v) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::domain_error("SNR must be finite and non-negative, got " + std::to_string(v));
  }
}

double distance(const Vec2& q, const SensorSite& sensor, double altitude) {
  return std::sqrt((q - sensor.position).squaredNorm() + altitude * altitude);
}

double channel_gain(const Vec2& q, const SensorSite& sensor, const Scenario& s) {
  const double d2 = (q - sensor.position).squaredNorm() + s.altitude() * s.altitude();
  return s.ref_gain() * std::pow(d2, -0.5 * s.path_loss_exp());
}

Eigen::VectorXd channel_gains(const Vec2& q, const Scenario& s) {
  Eigen::VectorXd g(s.num_sensors());
  for (int k = 0; k < s.num_sensors(); ++k) g[k] = channel_gain(q, s.sensors()[k], s);
  return g;
}

SnrValue snr_from_gains(const Eigen::VectorXd& gains, const Eigen::VectorXd& powers,
                        double noise_power) {
  double amplitude = 0.0;
  for (Eigen::Index k = 0; k < gains.size(); ++k) {
    if (powers[k] < 0.0) throw std::domain_error("negative transmit power");
    amplitude += std::sqrt(powers[k] * gains[k]);
  }
  return SnrValue(amplitude * amplitude / noise_power);
}

SnrValue snr(const Vec2& q, std::span<const double> powers, const Scenario& s) {
  if (static_cast<int>(powers.size()) != s.num_sensors()) {
    throw DimensionMismatch("power vector size does not match sensor count");
  }
  double amplitude = 0.0;
  for (int k = 0; k < s.num_sensors(); ++k) {
    if (powers[k] < 0.0) throw std::domain_error("negative transmit power");
    amplitude += std::sqrt(powers[k] * channel_gain(q, s.sensors()[k], s));
  }
  return SnrValue(amplitude * amplitude / s.noise_power());
}

SnrValue snr(const Vec2& q, const Eigen::VectorXd& powers, const Scenario& s) {
  return snr(q, std::span<const double>(powers.data(), static_cast<size_t>(powers.size())), s);
}

int outage_indicator(SnrValue v, double gamma) { return v.value() < gamma ? 1 : 0; }

namespace {

void check_dims(const Trajectory& tr, const PowerSchedule& ps, const Scenario& s) {
  if (tr.slots() != s.slots() || ps.slots() != s.slots() || ps.num_sensors() != s.num_sensors()) {
    throw DimensionMismatch("plan dimensions do not match the scenario (" +
                            std::to_string(s.num_sensors()) + " sensors, " +
                            std::to_string(s.slots()) + " slots)");
  }
}

}  // namespace

std::vector<double> slot_snrs(const Trajectory& tr, const PowerSchedule& ps, const Scenario& s) {
  check_dims(tr, ps, s);
  std::vector<double> out(static_cast<size_t>(s.slots()));
  for (int j = 0; j < s.slots(); ++j) {
    const Eigen::VectorXd p = ps.powers.col(j);
    out[static_cast<size_t>(j)] = snr(tr.slot_position(j), p, s).value();
  }
  return out;
}

double outage_probability(const Trajectory& tr, const PowerSchedule& ps, const Scenario& s) {
  const auto values = slot_snrs(tr, ps, s);
  int count = 0;
  for (double v : values) count += outage_indicator(SnrValue(v), s.snr_threshold());
  return static_cast<double>(count) / s.slots();
}

}  // namespace outage
