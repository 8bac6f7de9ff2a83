#include "outage/linear_program.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace outage {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kMaxIterations: return "max-iters";
  }
  return "unknown";
}

void LinearProgram::check() const {
  const auto n = objective.size();
  if (inequality_matrix.cols() != n && inequality_matrix.size() != 0) {
    throw std::invalid_argument("LP: inequality matrix column count differs from objective size");
  }
  if (inequality_matrix.rows() != inequality_rhs.size()) {
    throw std::invalid_argument("LP: inequality matrix row count differs from rhs size");
  }
  if (lower_bounds.size() != 0 && lower_bounds.size() != n) {
    throw std::invalid_argument("LP: lower bound size differs from objective size");
  }
  if (!objective.allFinite() || !inequality_matrix.allFinite() || !inequality_rhs.allFinite() ||
      !lower_bounds.allFinite()) {
    throw std::invalid_argument("LP: non-finite data");
  }
}

namespace {

// Dense tableau. Row 0..m-1 are constraints, column `cols` holds the rhs.
// The objective row is kept separately as reduced costs.
class Tableau {
 public:
  Tableau(Eigen::MatrixXd body, std::vector<int> basis)
      : t_(std::move(body)), basis_(std::move(basis)) {
    rows_ = static_cast<int>(t_.rows());
    cols_ = static_cast<int>(t_.cols()) - 1;
    scale_ = std::max(1.0, t_.cwiseAbs().maxCoeff());
  }

  // Runs Bland-rule pivots minimizing cost'x over columns allowed[j] == true.
  // Returns kOptimal, kUnbounded or kMaxIterations.
  SolveStatus optimize(const Eigen::VectorXd& cost, const std::vector<bool>& allowed, int& pivots,
                       int max_pivots) {
    const double eps = 1e-11 * scale_;
    while (true) {
      Eigen::VectorXd reduced = cost;
      for (int r = 0; r < rows_; ++r) {
        const double cb = cost[basis_[r]];
        if (cb != 0.0) reduced -= cb * t_.row(r).head(cols_).transpose();
      }
      int enter = -1;
      for (int j = 0; j < cols_; ++j) {
        if (allowed[j] && reduced[j] < -eps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return SolveStatus::kOptimal;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows_; ++r) {
        const double a = t_(r, enter);
        if (a > eps) {
          const double ratio = t_(r, cols_) / a;
          if (ratio < best_ratio - eps ||
              (std::abs(ratio - best_ratio) <= eps && basis_[r] < basis_[leave])) {
            best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return SolveStatus::kUnbounded;
      if (++pivots > max_pivots) return SolveStatus::kMaxIterations;
      pivot(leave, enter);
    }
  }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i < rows_; ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[r] = c;
  }

  Eigen::VectorXd values() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(cols_);
    for (int r = 0; r < rows_; ++r) x[basis_[r]] = t_(r, cols_);
    return x;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int basis(int r) const { return basis_[r]; }
  double entry(int r, int c) const { return t_(r, c); }
  double scale() const { return scale_; }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  int rows_ = 0;
  int cols_ = 0;
  double scale_ = 1.0;
};

}  // namespace

SolveOutcome solve_lp(const LinearProgram& lp, int max_pivots) {
  lp.check();
  const int n = static_cast<int>(lp.objective.size());
  const int m = static_cast<int>(lp.inequality_rhs.size());
  const Eigen::VectorXd lower =
      lp.lower_bounds.size() == 0 ? Eigen::VectorXd::Zero(n) : lp.lower_bounds;

  // Shift x = lower + y with y >= 0, then A y + s = b - A lower.
  Eigen::VectorXd rhs = lp.inequality_rhs;
  if (m > 0 && n > 0) rhs -= lp.inequality_matrix * lower;

  std::vector<int> negative_rows;
  for (int r = 0; r < m; ++r) {
    if (rhs[r] < 0.0) negative_rows.push_back(r);
  }
  const int n_art = static_cast<int>(negative_rows.size());
  const int cols = n + m + n_art;

  Eigen::MatrixXd body = Eigen::MatrixXd::Zero(m, cols + 1);
  std::vector<int> basis(static_cast<size_t>(m));
  int art = 0;
  for (int r = 0; r < m; ++r) {
    const double sign = rhs[r] < 0.0 ? -1.0 : 1.0;
    if (n > 0) body.row(r).head(n) = sign * lp.inequality_matrix.row(r);
    body(r, n + r) = sign;
    body(r, cols) = sign * rhs[r];
    if (sign < 0.0) {
      body(r, n + m + art) = 1.0;
      basis[static_cast<size_t>(r)] = n + m + art;
      ++art;
    } else {
      basis[static_cast<size_t>(r)] = n + r;
    }
  }

  Tableau tab(std::move(body), std::move(basis));
  SolveOutcome out;
  int pivots = 0;

  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
    phase1.tail(n_art).setOnes();
    std::vector<bool> allowed(static_cast<size_t>(cols), true);
    const SolveStatus st = tab.optimize(phase1, allowed, pivots, max_pivots);
    if (st == SolveStatus::kMaxIterations) {
      out.status = st;
      out.iterations = pivots;
      return out;
    }
    const Eigen::VectorXd v = tab.values();
    if (v.tail(n_art).sum() > 1e-9 * tab.scale()) {
      out.status = SolveStatus::kInfeasible;
      out.iterations = pivots;
      return out;
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    for (int r = 0; r < tab.rows(); ++r) {
      if (tab.basis(r) < n + m) continue;
      for (int j = 0; j < n + m; ++j) {
        if (std::abs(tab.entry(r, j)) > 1e-9) {
          tab.pivot(r, j);
          ++pivots;
          break;
        }
      }
    }
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
  cost.head(n) = lp.objective;
  std::vector<bool> allowed(static_cast<size_t>(cols), true);
  for (int j = n + m; j < cols; ++j) allowed[static_cast<size_t>(j)] = false;
  const SolveStatus st = tab.optimize(cost, allowed, pivots, max_pivots);

  out.status = st;
  out.iterations = pivots;
  if (st == SolveStatus::kOptimal || st == SolveStatus::kMaxIterations) {
    out.solution = lower + tab.values().head(n);
    out.objective = lp.objective.dot(out.solution);
  }
  return out;
}

}  // namespace outage
