#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "outage/solve_outcome.hpp"

namespace outage {

/// Value and derivatives of a term with respect to its own local variables.
/// When `diagonal_hessian` is set, `hessian` is a column holding the diagonal.
struct TermEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  bool diagonal_hessian = false;
};

/// Evaluates a term at its local variables. Returns false when the point is
/// outside the term's domain. Derivatives are only filled when requested.
using TermFunction = std::function<bool(const Eigen::VectorXd& local, TermEval& out, bool derivatives)>;

/// A convex, twice-differentiable function of a subset of the variables.
struct ConvexTerm {
  std::vector<int> vars;
  TermFunction fn;
};

/// c'x + d.
ConvexTerm affine_term(std::vector<int> vars, Eigen::VectorXd coeffs, double constant);

/// x'Qx + c'x + d with Q symmetric positive semidefinite.
ConvexTerm quadratic_term(std::vector<int> vars, Eigen::MatrixXd q, Eigen::VectorXd coeffs,
                          double constant);

/// w * ||x||^2 + d, w >= 0. Stores only a diagonal Hessian.
ConvexTerm squared_norm_term(std::vector<int> vars, double weight, double constant);

/// minimize sum(objective)  subject to  g_i(x) <= 0 for every constraint,
/// starting from a strictly feasible point.
struct SmoothConvexProgram {
  int dimension = 0;
  std::vector<ConvexTerm> objective;
  std::vector<ConvexTerm> constraints;
  Eigen::VectorXd start;
};

struct BarrierOptions {
  double tolerance = 1e-8;       // exit once m / t falls below this
  double initial_t = 1.0;
  double growth = 10.0;          // barrier parameter multiplier per outer step
  int max_newton_steps = 200;
  double armijo = 0.01;
  double backtrack = 0.5;
  double newton_tolerance = 1e-10;  // lambda^2 / 2 ending a centering phase
  // Constraints touching more variables than this enter the Newton system
  // as rank-one updates solved with the Woodbury identity.
  int low_rank_width = 16;
  // Optional early exits, checked on accepted iterates: stop as soon as the
  // objective drops below `stop_below`, or once a centered iterate certifies
  // that the optimum exceeds `stop_bound_above` (objective - m/t).
  std::optional<double> stop_below;
  std::optional<double> stop_bound_above;
};

struct BarrierOutcome : SolveOutcome {
  bool early_exit = false;
  int outer_steps = 0;
};

/// Log-barrier interior-point method with damped Newton centering
/// (Armijo backtracking). Returns kInfeasible when `start` is not strictly
/// feasible and kMaxIterations (with the last iterate) when the Newton
/// budget runs out.
BarrierOutcome solve_barrier(const SmoothConvexProgram& p, const BarrierOptions& options = {});

}  // namespace outage
