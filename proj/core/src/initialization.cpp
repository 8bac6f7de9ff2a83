#include "outage/initialization.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace outage {

const char* to_string(InitKind kind) {
  return kind == InitKind::kShf ? "shf" : "direct";
}

namespace {

double path_length(const Vec2& start, const std::vector<Vec2>& pts, const std::vector<int>& order,
                   const Vec2& finish) {
  double len = 0.0;
  Vec2 at = start;
  for (int i : order) {
    len += (pts[static_cast<size_t>(i)] - at).norm();
    at = pts[static_cast<size_t>(i)];
  }
  return len + (finish - at).norm();
}

}  // namespace

std::vector<int> shortest_visiting_order(const Vec2& start, const std::vector<Vec2>& points,
                                         const Vec2& finish) {
  const int v = static_cast<int>(points.size());
  std::vector<int> order(static_cast<size_t>(v));
  std::iota(order.begin(), order.end(), 0);
  if (v <= 1) return order;

  if (v <= 8) {
    std::vector<int> best = order;
    double best_len = path_length(start, points, order, finish);
    while (std::next_permutation(order.begin(), order.end())) {
      const double len = path_length(start, points, order, finish);
      if (len < best_len) {
        best_len = len;
        best = order;
      }
    }
    return best;
  }

  // Nearest neighbour from the start.
  std::vector<bool> used(static_cast<size_t>(v), false);
  order.clear();
  Vec2 at = start;
  for (int step = 0; step < v; ++step) {
    int pick = -1;
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < v; ++i) {
      if (used[static_cast<size_t>(i)]) continue;
      const double di = (points[static_cast<size_t>(i)] - at).norm();
      if (di < d) {
        d = di;
        pick = i;
      }
    }
    used[static_cast<size_t>(pick)] = true;
    order.push_back(pick);
    at = points[static_cast<size_t>(pick)];
  }
  // 2-opt on the open path with fixed ends.
  bool improved = true;
  double len = path_length(start, points, order, finish);
  while (improved) {
    improved = false;
    for (int i = 0; i < v - 1; ++i) {
      for (int j = i + 1; j < v; ++j) {
        std::reverse(order.begin() + i, order.begin() + j + 1);
        const double cand = path_length(start, points, order, finish);
        if (cand < len - 1e-12) {
          len = cand;
          improved = true;
        } else {
          std::reverse(order.begin() + i, order.begin() + j + 1);
        }
      }
    }
  }
  return order;
}

InitTrajectory init_direct(const Scenario& s) {
  InitTrajectory init;
  init.kind = InitKind::kDirect;
  init.trajectory = direct_trajectory(s);
  return init;
}

InitTrajectory init_shf(const Scenario& s, const HoverPlan& plan) {
  if (plan.clusters.empty()) return init_direct(s);

  std::vector<Vec2> pts;
  std::vector<double> weights;
  for (const auto& c : plan.clusters) {
    pts.push_back(c.location);
    weights.push_back(c.duration);
  }
  const std::vector<int> order = shortest_visiting_order(s.start(), pts, s.finish());
  const double fly = path_length(s.start(), pts, order, s.finish()) / s.v_max();
  if (fly > s.duration()) return init_direct(s);

  double total_w = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total_w > 0.0)) {
    std::fill(weights.begin(), weights.end(), 1.0);
    total_w = static_cast<double>(weights.size());
  }
  const double spare = s.duration() - fly;

  // Timed path: (arrival, departure) at each visited cluster.
  struct Stop {
    Vec2 at;
    double arrive;
    double leave;
  };
  std::vector<Stop> stops;
  double clock = 0.0;
  Vec2 at = s.start();
  for (int i : order) {
    const Vec2& p = pts[static_cast<size_t>(i)];
    clock += (p - at).norm() / s.v_max();
    const double hover = spare * weights[static_cast<size_t>(i)] / total_w;
    stops.push_back({p, clock, clock + hover});
    clock += hover;
    at = p;
  }

  const auto position = [&](double t) -> Vec2 {
    Vec2 from = s.start();
    double from_t = 0.0;
    for (const auto& st : stops) {
      if (t <= st.arrive) {
        const double span = st.arrive - from_t;
        const double f = span > 0.0 ? (t - from_t) / span : 1.0;
        return from + f * (st.at - from);
      }
      if (t <= st.leave) return st.at;
      from = st.at;
      from_t = st.leave;
    }
    const double span = s.duration() - from_t;
    const double f = span > 0.0 ? std::min(1.0, (t - from_t) / span) : 1.0;
    return from + f * (s.finish() - from);
  };

  InitTrajectory init;
  init.kind = InitKind::kShf;
  init.visit_order = order;
  const int n = s.slots();
  init.trajectory.slot_length = s.slot_length();
  init.trajectory.waypoints.resize(static_cast<size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    init.trajectory.waypoints[static_cast<size_t>(i)] = position(s.slot_length() * i);
  }
  init.trajectory.waypoints.front() = s.start();
  init.trajectory.waypoints.back() = s.finish();
  return init;
}

}  // namespace outage
