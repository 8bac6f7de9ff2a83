#pragma once

#include <Eigen/Core>

namespace outage {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kMaxIterations };

const char* to_string(SolveStatus status);

struct SolveOutcome {
  Eigen::VectorXd solution;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kMaxIterations;
  int iterations = 0;
  double duality_gap = 0.0;  // barrier: m / t at exit; simplex: 0

  bool optimal() const noexcept { return status == SolveStatus::kOptimal; }
};

}  // namespace outage
