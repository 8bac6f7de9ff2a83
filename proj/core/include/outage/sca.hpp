#pragma once

// Finite-horizon planner: alternating successive convex approximation over
// the trajectory and the power schedule. Each step maximizes the capped SNR
// sum (1/N) sum_n min(gamma, SNR[n]) through tight global lower bounds on
// the received amplitudes and on their squared sum.

#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "outage/barrier.hpp"
#include "outage/scenario.hpp"

namespace outage {

/// Lower bound on sqrt(P beta0 d^-alpha(q)) from the first-order expansion
/// of (||q - S||^2 + H^2)^(-alpha/4) around q_ref. Exact at q = q_ref.
double amplitude_lower_bound(const Vec2& q, const Vec2& q_ref, double power,
                             const SensorSite& sensor, const Scenario& s);

/// True amplitude sqrt(P beta0 d^-alpha(q)).
double received_amplitude(const Vec2& q, double power, const SensorSite& sensor,
                          const Scenario& s);

/// Tangent lower bound of (sum a)^2 at a_ref:
/// (sum a_ref)^2 + 2 (sum a_ref)(sum a - sum a_ref).
double square_sum_lower_bound(const Eigen::VectorXd& a, const Eigen::VectorXd& a_ref);

enum class StepKind { kInit, kTrajectory, kPower };

const char* to_string(StepKind kind);

struct TraceEntry {
  int iter = 0;
  double objective = 0.0;
  StepKind kind = StepKind::kInit;
  bool accepted = true;
};

/// Iterate of the alternating scheme.
///
/// `amplitudes` (K x N) always hold the true received amplitudes at the
/// current (q, P) and `received` (N) holds A[n] = min(gamma sigma^2,
/// (sum_k a_k[n])^2), so the surrogate objective never overstates the
/// achievable SNR.
struct ScaState {
  Trajectory trajectory;
  PowerSchedule powers;
  Eigen::MatrixXd amplitudes;
  Eigen::VectorXd received;  // watts
  int iteration = 0;
  std::vector<TraceEntry> trace;

  /// (1/N) sum_n A[n] / sigma^2.
  double objective(const Scenario& s) const;
};

/// State with auxiliaries set from (tr, ps). Throws DimensionMismatch.
ScaState make_state(const Scenario& s, Trajectory tr, PowerSchedule ps);

struct ScaOptions {
  int max_rounds = 50;
  double relative_tolerance = 1e-4;  // per full round
  bool optimize_trajectory = true;
  bool optimize_powers = true;
  // Interior start: blend the trajectory towards the direct flight by this
  // weight and shrink the auxiliaries by `aux_shrink`.
  double start_blend = 0.01;
  double aux_shrink = 0.99;
  BarrierOptions barrier = default_barrier();

  static BarrierOptions default_barrier() {
    BarrierOptions b;
    b.tolerance = 1e-7;
    b.max_newton_steps = 400;
    return b;
  }
};

/// One convexified trajectory update with powers fixed. A step that fails,
/// has no strictly feasible start, or would lower the objective is recorded
/// as rejected and the previous iterate is kept.
ScaState trajectory_step(const ScaState& state, const Scenario& s, const ScaOptions& options = {});

/// One convexified power update with the trajectory fixed.
ScaState power_step(const ScaState& state, const Scenario& s, const ScaOptions& options = {});

struct ScaResult {
  ScaState state;
  int rounds = 0;
  bool converged = false;

  const Trajectory& trajectory() const { return state.trajectory; }
  const PowerSchedule& powers() const { return state.powers; }
};

/// Alternates trajectory and power steps from `init` with uniform powers
/// P_k[n] = P_k^ave until a round improves the objective by less than the
/// relative tolerance, or the round limit is hit.
ScaResult plan_sca(const Scenario& s, const Trajectory& init, const ScaOptions& options = {});

/// `iter,objective,step_kind,accepted`.
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace);

}  // namespace outage
