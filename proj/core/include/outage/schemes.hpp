#pragma once

// The proposed pipeline and the three comparison schemes.

#include <functional>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "outage/grid.hpp"
#include "outage/initialization.hpp"
#include "outage/recovery.hpp"
#include "outage/relaxed.hpp"
#include "outage/sca.hpp"

namespace outage {

enum class BenchmarkKind { kFlyHoverFly, kPowerOnly, kTrajectoryOnly };

const char* to_string(BenchmarkKind kind);
std::optional<BenchmarkKind> parse_benchmark_kind(std::string_view text);

struct SchemeResult {
  Trajectory trajectory;
  PowerSchedule powers;
  double outage = 1.0;
};

struct FlyHoverFlyResult : SchemeResult {
  int via_index = -1;  // grid point, -1 when falling back to the direct flight
  Vec2 via = Vec2::Zero();
  int evaluated = 0;   // via-points that went through power recovery
};

/// Fly to `via` at V_max, hover, fly on to q_F at V_max. Empty when the
/// two legs do not fit in T.
std::optional<Trajectory> fly_hover_fly_trajectory(const Scenario& s, const Vec2& via);

/// Exhaustive via-point search over the grid. Points are screened with an
/// upper bound on the servable slot count, so only candidates that can still
/// beat the incumbent are run through power recovery. Ties go to the first
/// grid point in row-major order.
FlyHoverFlyResult run_fly_hover_fly(const Scenario& s, const GridSpec& grid,
                                    const RecoveryOptions& recovery = {});

/// Constant-speed direct flight, powers from recovery.
SchemeResult run_power_only(const Scenario& s, const RecoveryOptions& recovery = {});

/// Trajectory steps only with uniform powers P_k^ave; outage counted directly.
SchemeResult run_trajectory_only(const Scenario& s, const InitTrajectory& init,
                                 const ScaOptions& options = {});

struct ProposedResult : SchemeResult {
  RelaxedSolution relaxed;
  InitTrajectory init;
  ScaResult sca;
  RecoveryResult recovery;
};

/// Relaxed optimum -> SHF initialization -> alternating SCA -> recovery.
ProposedResult run_proposed(const Scenario& s, const GridSpec& grid,
                            const ScaOptions& sca = {}, const RecoveryOptions& recovery = {});

/// Worker count: OUTAGE_PLANNER_THREADS if set (>= 1), else hardware
/// concurrency.
int worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads.
void parallel_for(int count, int workers, const std::function<void(int)>& body);

struct SweepRow {
  std::string scheme;
  double p_ave_dbm = 0.0;
  double t_s = 0.0;
  double outage = 1.0;
};

/// `scheme,p_ave_dbm,t_s,outage`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace outage
