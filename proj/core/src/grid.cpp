#include "outage/grid.hpp"

#include <stdexcept>

#include "outage/channel.hpp"

namespace outage {

GainField::GainField(const Scenario& s, const GridSpec& spec) : resolution_(spec.resolution) {
  if (spec.resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
  const double margin = spec.margin < 0.0 ? s.altitude() : spec.margin;
  Vec2 lo = s.sensors().front().position;
  Vec2 hi = lo;
  for (const auto& site : s.sensors()) {
    lo = lo.cwiseMin(site.position);
    hi = hi.cwiseMax(site.position);
  }
  lo.array() -= margin;
  hi.array() += margin;
  step_x_ = (hi.x() - lo.x()) / (resolution_ - 1);
  step_y_ = (hi.y() - lo.y()) / (resolution_ - 1);

  points_.reserve(static_cast<size_t>(resolution_) * resolution_);
  for (int iy = 0; iy < resolution_; ++iy) {
    for (int ix = 0; ix < resolution_; ++ix) {
      points_.emplace_back(lo.x() + ix * step_x_, lo.y() + iy * step_y_);
    }
  }
  gains_.resize(s.num_sensors(), size());
  for (int i = 0; i < size(); ++i) gains_.col(i) = channel_gains(points_[static_cast<size_t>(i)], s);
}

}  // namespace outage
