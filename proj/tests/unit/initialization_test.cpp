#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "outage/initialization.hpp"

using namespace outage;

namespace {

HoverPlan plan_with(const std::vector<std::pair<Vec2, double>>& spots, double horizon) {
  HoverPlan plan;
  plan.horizon = horizon;
  double hover = 0.0;
  for (size_t i = 0; i < spots.size(); ++i) {
    plan.candidates.push_back({spots[i].first, Eigen::VectorXd::Zero(1)});
    plan.durations.push_back(spots[i].second);
    plan.clusters.push_back({spots[i].first, {static_cast<int>(i)}, spots[i].second});
    hover += spots[i].second;
  }
  plan.outage_duration = horizon - hover;
  plan.outage_probability = plan.outage_duration / horizon;
  return plan;
}

}  // namespace

TEST_SUITE("initialization") {

TEST_CASE("visiting order is optimal up to eight points") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0.0, 200.0);
  for (int n = 1; n <= 8; ++n) {
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) pts.emplace_back(pos(rng), pos(rng));
    const Vec2 a(0, 0), b(200, 200);
    const auto order = shortest_visiting_order(a, pts, b);
    const auto best = oracle::brute_force_order(a, pts, b);
    CHECK(oracle::path_length(a, pts, order, b) ==
          doctest::Approx(oracle::path_length(a, pts, best, b)));
  }
}

TEST_CASE("larger instances give a permutation no longer than nearest neighbour") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(0.0, 200.0);
  std::vector<Vec2> pts;
  for (int i = 0; i < 14; ++i) pts.emplace_back(pos(rng), pos(rng));
  const auto order = shortest_visiting_order({0, 0}, pts, {200, 200});
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 14; ++i) CHECK(sorted[static_cast<size_t>(i)] == i);

  std::vector<int> nn;
  std::vector<bool> used(14, false);
  Vec2 at(0, 0);
  for (int step = 0; step < 14; ++step) {
    int pick = -1;
    for (int i = 0; i < 14; ++i) {
      if (!used[static_cast<size_t>(i)] &&
          (pick < 0 || (pts[static_cast<size_t>(i)] - at).norm() < (pts[static_cast<size_t>(pick)] - at).norm())) {
        pick = i;
      }
    }
    used[static_cast<size_t>(pick)] = true;
    nn.push_back(pick);
    at = pts[static_cast<size_t>(pick)];
  }
  CHECK(oracle::path_length({0, 0}, pts, order, {200, 200}) <=
        oracle::path_length({0, 0}, pts, nn, {200, 200}) + 1e-9);
}

TEST_CASE("SHF visits every cluster and hovers in proportion") {
  const Scenario s = fixtures::paper_scenario(30.0, 20.0, 200);
  const HoverPlan plan = plan_with({{{180, 20}, 2.0}, {{40, 20}, 6.0}}, 20.0);
  const InitTrajectory init = init_shf(s, plan);
  REQUIRE(init.kind == InitKind::kShf);
  CHECK(init.visit_order == std::vector<int>{1, 0});
  CHECK(validate_plan(s, init.trajectory, PowerSchedule::uniform(s)).feasible());
  // Waypoints sitting on each cluster, counted in slot lengths.
  const auto time_at = [&](const Vec2& c) {
    int count = 0;
    for (const auto& q : init.trajectory.waypoints) count += (q - c).norm() < 1e-6;
    return count * s.slot_length();
  };
  const double travel = ((Vec2(40, 20)).norm() + (Vec2(140, 0)).norm() + (Vec2(20, 180)).norm()) / 40.0;
  const double spare = 20.0 - travel;
  CHECK(time_at({40, 20}) == doctest::Approx(0.75 * spare).epsilon(0.05));
  CHECK(time_at({180, 20}) == doctest::Approx(0.25 * spare).epsilon(0.05));
}

TEST_CASE("SHF falls back to the direct flight") {
  const Scenario s = fixtures::paper_scenario(30.0, 8.0, 16);
  SUBCASE("tour too long") {
    const HoverPlan plan = plan_with({{{0, 200}, 1.0}, {{200, 0}, 1.0}}, 8.0);
    const InitTrajectory init = init_shf(s, plan);
    CHECK(init.kind == InitKind::kDirect);
    CHECK(init.trajectory.waypoints == direct_trajectory(s).waypoints);
  }
  SUBCASE("no hover location") {
    const InitTrajectory init = init_shf(s, plan_with({}, 8.0));
    CHECK(init.kind == InitKind::kDirect);
  }
  CHECK(init_direct(s).kind == InitKind::kDirect);
}

}
