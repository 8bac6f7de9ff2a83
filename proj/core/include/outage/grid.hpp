#pragma once

#include <vector>

#include <Eigen/Core>

#include "outage/scenario.hpp"

namespace outage {

/// Exhaustive-search grid: the sensors' bounding box grown by `margin`
/// (default: the altitude H) on every side, `resolution` points per axis.
struct GridSpec {
  int resolution = 81;
  double margin = -1.0;  // < 0 means use the altitude
};

/// Grid points in row-major order (y rows, x columns) together with the
/// channel gain of every sensor at every point.
class GainField {
 public:
  GainField(const Scenario& s, const GridSpec& spec);

  int size() const noexcept { return static_cast<int>(points_.size()); }
  int resolution() const noexcept { return resolution_; }
  const std::vector<Vec2>& points() const noexcept { return points_; }
  const Vec2& point(int i) const { return points_[static_cast<size_t>(i)]; }
  /// K x G matrix of beta0 d^-alpha.
  const Eigen::MatrixXd& gains() const noexcept { return gains_; }
  double step_x() const noexcept { return step_x_; }
  double step_y() const noexcept { return step_y_; }
  double max_step() const noexcept { return std::max(step_x_, step_y_); }

 private:
  int resolution_ = 0;
  double step_x_ = 0.0;
  double step_y_ = 0.0;
  std::vector<Vec2> points_;
  Eigen::MatrixXd gains_;
};

}  // namespace outage
