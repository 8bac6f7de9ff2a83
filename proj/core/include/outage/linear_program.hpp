#pragma once

#include <Eigen/Core>

#include "outage/solve_outcome.hpp"

namespace outage {

/// minimize c'x  subject to  A x <= b,  x >= lower.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd inequality_matrix;
  Eigen::VectorXd inequality_rhs;
  Eigen::VectorXd lower_bounds;  // empty means all zero

  /// Throws std::invalid_argument on inconsistent sizes or non-finite data.
  void check() const;
};

/// Two-phase dense tableau simplex with Bland's anti-cycling rule.
/// Deterministic for identical input. Reports kUnbounded / kInfeasible
/// as distinct statuses.
SolveOutcome solve_lp(const LinearProgram& lp, int max_pivots = 100000);

}  // namespace outage
