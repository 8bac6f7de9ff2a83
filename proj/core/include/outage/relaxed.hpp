#pragma once

// Speed-unconstrained relaxation: the UAV may jump between hover points, so
// the best achievable outage is a time-sharing of (location, power) operating
// points. Solved through the Lagrange dual of the average-power constraints:
// for fixed prices mu the per-instant problem splits into "stay silent"
// (cost 1) or "transmit at the cheapest location" (cost sum_k mu_k P_k).

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "outage/grid.hpp"
#include "outage/scenario.hpp"

namespace outage {

/// Prices below this are treated as zero (degenerate branch).
inline constexpr double kMuEpsilon = 1e-12;

/// Non-negative Lagrange multipliers, one per sensor budget.
class DualPoint {
 public:
  DualPoint() = default;
  explicit DualPoint(Eigen::VectorXd mu);
  static DualPoint zeros(int k) { return DualPoint(Eigen::VectorXd::Zero(k)); }

  const Eigen::VectorXd& values() const noexcept { return mu_; }
  double operator[](Eigen::Index k) const { return mu_[k]; }
  Eigen::Index size() const noexcept { return mu_.size(); }
  bool degenerate() const { return (mu_.array() <= kMuEpsilon).any(); }

 private:
  Eigen::VectorXd mu_;
};

/// Closed-form KKT powers for mu > 0 without the per-instant cap:
/// rho_k = sqrt(gamma g_k) sigma / (mu_k sum_j g_j / mu_j), P_k = rho_k^2.
Eigen::VectorXd kkt_powers(const DualPoint& mu, const Eigen::VectorXd& gains, const Scenario& s);

/// Minimum-cost powers meeting SNR == gamma_min at `q` for prices `mu`, with
/// every sensor capped at N P_k^ave (the whole budget spent in one slot).
///
/// With every mu_k > kMuEpsilon this is kkt_powers unless a cap binds, in
/// which case capped sensors sit at the cap and the rest share the remaining
/// amplitude by water-filling. Otherwise zero-price sensors are free and the
/// problem is handed to the barrier solver. Where the threshold cannot be
/// reached within the caps every sensor is returned at its cap (and the
/// threshold is missed).
Eigen::VectorXd powers_given_location(const DualPoint& mu, const Vec2& q, const Scenario& s);
Eigen::VectorXd powers_from_gains(const DualPoint& mu, const Eigen::VectorXd& gains,
                                  const Scenario& s);

/// sum_k mu_k P_k of the powers above, +infinity where the threshold is
/// unreachable. Closed form (or water-filling) in both branches.
double transmit_cost(const DualPoint& mu, const Eigen::VectorXd& gains, const Scenario& s);

enum class SubproblemBranch { kOutage, kTransmit };

struct SubproblemSolution {
  SubproblemBranch branch = SubproblemBranch::kOutage;
  std::optional<Vec2> location;  // present iff transmit
  int grid_index = -1;
  Eigen::VectorXd powers;        // zero on the outage branch
  double value = 1.0;
};

/// Per-instant problem: min over {outage (value 1), transmit at the best grid
/// point}. Ties on the grid go to the first point in row-major order.
SubproblemSolution solve_pointwise_subproblem(const DualPoint& mu, const Scenario& s,
                                              const GainField& field);
SubproblemSolution solve_pointwise_subproblem(const DualPoint& mu, const Scenario& s,
                                              const GridSpec& grid);

struct DualEvaluation {
  double value = 0.0;
  Eigen::VectorXd subgradient;  // P_k(mu) - P_k^ave
  SubproblemSolution subproblem;
};

/// Time-normalized dual function g(mu) = v(mu) - sum_k mu_k P_k^ave.
DualEvaluation dual_function(const DualPoint& mu, const Scenario& s, const GainField& field);
DualEvaluation dual_function(const DualPoint& mu, const Scenario& s, const GridSpec& grid);

struct EllipsoidOptions {
  int max_iterations = 20000;
  // Stop once the certified bound best - lower_bound drops below this.
  double gap_tolerance = 1e-10;
  // Or once the ellipsoid has shrunk by this factor along an average axis,
  // i.e. (vol / vol0)^(1/K).
  double axis_ratio = 1e-10;
};

struct DualMaximum {
  DualPoint mu;
  double value = 0.0;
  double gap_bound = 0.0;  // value* - value <= gap_bound
  int iterations = 0;
};

/// Upper end of the initial box for every mu_k: 2 / min_k P_k^ave.
double dual_box_bound(const Scenario& s);

/// Maximizes g over mu >= 0 with the central-cut ellipsoid method started from
/// the ball around the box [0, dual_box_bound]^K. Returns the best iterate.
DualMaximum maximize_dual(const Scenario& s, const GainField& field,
                          const EllipsoidOptions& options = {});
DualMaximum maximize_dual(const Scenario& s, const GridSpec& grid,
                          const EllipsoidOptions& options = {});

/// Maximizes min_q sum_k mu_k P_k(mu, q) over {mu >= 0, mu . P^ave <= 1}.
/// When the dual optimum is mu = 0 (zero relaxed outage) the dual carries no
/// price information, because the transmit cost is homogeneous in mu; these
/// prices are the ones supporting the zero-outage time-sharing.
DualMaximum supporting_prices(const Scenario& s, const GainField& field,
                              const EllipsoidOptions& options = {});

struct HoverCandidate {
  Vec2 location = Vec2::Zero();
  Eigen::VectorXd powers;  // watts, per sensor
};

/// A hover location: neighbouring operating points merged into one place.
struct HoverCluster {
  Vec2 location = Vec2::Zero();  // centroid of the members
  std::vector<int> members;      // indices into HoverPlan::candidates
  double duration = 0.0;         // total hover time of the members
};

/// Time-shared relaxed optimum.
///
/// `candidates` are the minimizing grid operating points at the dual optimum
/// and carry the durations of the time-sharing LP. Grid quantization can
/// split one physical hover spot into adjacent operating points, so
/// `clusters` groups them into the hover locations. Clusters with no hover
/// time are dropped.
struct HoverPlan {
  std::vector<HoverCandidate> candidates;
  std::vector<double> durations;  // seconds, one per candidate
  std::vector<HoverCluster> clusters;
  double outage_duration = 0.0;   // seconds
  double horizon = 0.0;           // T
  double outage_probability = 1.0;

  double total_hover_time() const;
};

struct HoverPlanOptions {
  double tie_tolerance = 1e-6;  // relative, on the transmit cost
  double cluster_steps = 2.0;   // merge radius in grid steps
  // Prices used to rank locations are floored at this fraction of the box
  // bound, so that a zero price still yields a unique cheapest location.
  double price_floor = 1e-6;
};

/// Recovers the primal time-sharing plan at the dual optimum: collects the
/// (near-)minimizing grid points, solves the hover-duration LP over them and
/// clusters them into hover locations.
HoverPlan build_hover_plan(const DualPoint& mu_opt, const Scenario& s, const GainField& field,
                           const HoverPlanOptions& options = {});
HoverPlan build_hover_plan(const DualPoint& mu_opt, const Scenario& s, const GridSpec& grid,
                           const HoverPlanOptions& options = {});

struct RelaxedSolution {
  DualMaximum dual;
  DualPoint plan_prices;  // prices the plan was built from
  HoverPlan plan;
};

/// maximize_dual followed by build_hover_plan on one shared grid. When the
/// dual value is zero the plan is built from supporting_prices instead.
RelaxedSolution solve_relaxed(const Scenario& s, const GridSpec& grid = {},
                              const EllipsoidOptions& options = {});

}  // namespace outage
