#pragma once

#include <vector>

#include "outage/relaxed.hpp"
#include "outage/scenario.hpp"

namespace outage {

enum class InitKind { kShf, kDirect };

const char* to_string(InitKind kind);

/// Initial trajectory for the SCA planner.
struct InitTrajectory {
  InitKind kind = InitKind::kDirect;
  Trajectory trajectory;
  std::vector<int> visit_order;  // cluster indices, SHF only
};

/// Order of `points` minimizing the path start -> points -> finish. Exact
/// for up to 8 points, nearest neighbour plus 2-opt beyond that.
std::vector<int> shortest_visiting_order(const Vec2& start, const std::vector<Vec2>& points,
                                         const Vec2& finish);

/// Successive hover-and-fly: visits the hover clusters of `plan` at V_max in
/// the shortest order and splits the spare time among them in proportion to
/// their hover durations. Falls back to the direct flight when the tour
/// cannot be flown within T or the plan has no hover location.
InitTrajectory init_shf(const Scenario& s, const HoverPlan& plan);

InitTrajectory init_direct(const Scenario& s);

}  // namespace outage
