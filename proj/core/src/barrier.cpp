#include "outage/barrier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace outage {

ConvexTerm affine_term(std::vector<int> vars, Eigen::VectorXd coeffs, double constant) {
  if (coeffs.size() != static_cast<Eigen::Index>(vars.size())) {
    throw std::invalid_argument("affine_term: coefficient count differs from variable count");
  }
  return {std::move(vars), [coeffs = std::move(coeffs), constant](const Eigen::VectorXd& x,
                                                                    TermEval& out, bool derivs) {
            out.value = coeffs.dot(x) + constant;
            if (derivs) {
              out.gradient = coeffs;
              out.hessian.resize(0, 0);
              out.diagonal_hessian = false;
            }
            return true;
          }};
}

ConvexTerm quadratic_term(std::vector<int> vars, Eigen::MatrixXd q, Eigen::VectorXd coeffs,
                          double constant) {
  const auto n = static_cast<Eigen::Index>(vars.size());
  if (q.rows() != n || q.cols() != n || coeffs.size() != n) {
    throw std::invalid_argument("quadratic_term: dimension mismatch");
  }
  return {std::move(vars),
          [q = std::move(q), coeffs = std::move(coeffs), constant](const Eigen::VectorXd& x,
                                                                    TermEval& out, bool derivs) {
            const Eigen::VectorXd qx = q * x;
            out.value = x.dot(qx) + coeffs.dot(x) + constant;
            if (derivs) {
              out.gradient = 2.0 * qx + coeffs;
              out.hessian = 2.0 * q;
              out.diagonal_hessian = false;
            }
            return true;
          }};
}

ConvexTerm squared_norm_term(std::vector<int> vars, double weight, double constant) {
  if (weight < 0.0) throw std::invalid_argument("squared_norm_term: negative weight");
  return {std::move(vars), [weight, constant](const Eigen::VectorXd& x, TermEval& out, bool derivs) {
            out.value = weight * x.squaredNorm() + constant;
            if (derivs) {
              out.gradient = 2.0 * weight * x;
              out.hessian = Eigen::VectorXd::Constant(x.size(), 2.0 * weight);
              out.diagonal_hessian = true;
            }
            return true;
          }};
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

class BarrierSolver {
 public:
  BarrierSolver(const SmoothConvexProgram& p, const BarrierOptions& o)
      : p_(p), o_(o), n_(p.dimension), m_(static_cast<int>(p.constraints.size())) {
    objective_evals_.resize(p_.objective.size());
    constraint_evals_.resize(p_.constraints.size());
    for (const auto& term : p_.constraints) {
      if (static_cast<int>(term.vars.size()) > o_.low_rank_width) ++wide_;
    }
  }

  BarrierOutcome run() {
    BarrierOutcome out;
    if (p_.start.size() != n_) throw std::invalid_argument("barrier: start has wrong dimension");
    Eigen::VectorXd x = p_.start;
    double f = 0.0;
    if (!evaluate(x, false, f) || !strictly_feasible()) {
      out.status = SolveStatus::kInfeasible;
      out.solution = x;
      return out;
    }
    if (m_ == 0) throw std::invalid_argument("barrier: program has no inequality constraints");

    double t = o_.initial_t;
    int newton = 0;
    while (true) {
      // Centering.
      while (true) {
        double fx = 0.0;
        evaluate(x, true, fx);
        Eigen::VectorXd grad;
        const Eigen::VectorXd dx = newton_direction(t, grad);
        const double decrement = -grad.dot(dx);
        const double phi0 = t * fx - log_barrier();
        // Below this the merit function cannot resolve further decrease.
        const double resolution = 64.0 * std::numeric_limits<double>::epsilon() *
                                  (std::abs(t * fx) + std::abs(log_barrier()) + 1.0);
        if (!(decrement >= 0.0) || decrement / 2.0 <= std::max(o_.newton_tolerance, resolution)) {
          break;
        }

        double step = 1.0;
        Eigen::VectorXd candidate;
        bool accepted = false;
        while (step > 1e-20) {
          candidate = x + step * dx;
          double fc = 0.0;
          if (evaluate(candidate, false, fc) && strictly_feasible()) {
            const double phi = t * fc - log_barrier();
            if (phi <= phi0 - o_.armijo * step * decrement) {
              accepted = true;
              break;
            }
          }
          step *= o_.backtrack;
        }
        if (!accepted) break;
        x = std::move(candidate);
        ++newton;
        evaluate(x, false, f);
        if (o_.stop_below && f <= *o_.stop_below) {
          return finish(out, x, f, SolveStatus::kOptimal, newton, m_ / t, true);
        }
        if (newton >= o_.max_newton_steps) {
          return finish(out, x, f, SolveStatus::kMaxIterations, newton, m_ / t, false);
        }
      }
      ++out.outer_steps;
      evaluate(x, false, f);
      const double gap = m_ / t;
      if (o_.stop_bound_above && f - gap > *o_.stop_bound_above) {
        return finish(out, x, f, SolveStatus::kOptimal, newton, gap, true);
      }
      if (gap <= o_.tolerance) return finish(out, x, f, SolveStatus::kOptimal, newton, gap, false);
      t *= o_.growth;
    }
  }

 private:
  static BarrierOutcome& finish(BarrierOutcome& out, const Eigen::VectorXd& x, double f,
                                SolveStatus status, int newton, double gap, bool early) {
    out.solution = x;
    out.objective = f;
    out.status = status;
    out.iterations = newton;
    out.duality_gap = gap;
    out.early_exit = early;
    return out;
  }

  static Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<int>& vars) {
    Eigen::VectorXd local(static_cast<Eigen::Index>(vars.size()));
    for (size_t i = 0; i < vars.size(); ++i) local[static_cast<Eigen::Index>(i)] = x[vars[i]];
    return local;
  }

  // Evaluates every term; returns false when any term is outside its domain.
  bool evaluate(const Eigen::VectorXd& x, bool derivs, double& f) {
    f = 0.0;
    for (size_t i = 0; i < p_.objective.size(); ++i) {
      const auto& term = p_.objective[i];
      if (!term.fn(gather(x, term.vars), objective_evals_[i], derivs)) return false;
      f += objective_evals_[i].value;
    }
    for (size_t i = 0; i < p_.constraints.size(); ++i) {
      const auto& term = p_.constraints[i];
      if (!term.fn(gather(x, term.vars), constraint_evals_[i], derivs)) return false;
    }
    return std::isfinite(f);
  }

  bool strictly_feasible() const {
    for (const auto& e : constraint_evals_) {
      if (!(e.value < 0.0)) return false;
    }
    return true;
  }

  double log_barrier() const {
    double s = 0.0;
    for (const auto& e : constraint_evals_) s += std::log(-e.value);
    return s;
  }

  template <typename AddFn>
  static void add_hessian(const ConvexTerm& term, const TermEval& e, double w, AddFn&& add) {
    if (e.hessian.size() == 0) return;
    const auto nv = static_cast<Eigen::Index>(term.vars.size());
    if (e.diagonal_hessian) {
      for (Eigen::Index a = 0; a < nv; ++a) add(term.vars[a], term.vars[a], w * e.hessian(a, 0));
      return;
    }
    for (Eigen::Index a = 0; a < nv; ++a) {
      for (Eigen::Index b = 0; b < nv; ++b) add(term.vars[a], term.vars[b], w * e.hessian(a, b));
    }
  }

  template <typename AddFn>
  static void add_outer(const ConvexTerm& term, const TermEval& e, double w, AddFn&& add) {
    const auto nv = static_cast<Eigen::Index>(term.vars.size());
    for (Eigen::Index a = 0; a < nv; ++a) {
      for (Eigen::Index b = 0; b < nv; ++b) add(term.vars[a], term.vars[b], w * e.gradient[a] * e.gradient[b]);
    }
  }

  // Solves H dx = -grad for the barrier function t f - sum log(-g).
  Eigen::VectorXd newton_direction(double t, Eigen::VectorXd& grad) {
    grad = Eigen::VectorXd::Zero(n_);
    for (size_t i = 0; i < p_.objective.size(); ++i) {
      const auto& term = p_.objective[i];
      for (size_t a = 0; a < term.vars.size(); ++a) {
        grad[term.vars[a]] += t * objective_evals_[i].gradient[static_cast<Eigen::Index>(a)];
      }
    }
    for (size_t i = 0; i < p_.constraints.size(); ++i) {
      const auto& term = p_.constraints[i];
      const double inv = -1.0 / constraint_evals_[i].value;
      for (size_t a = 0; a < term.vars.size(); ++a) {
        grad[term.vars[a]] += inv * constraint_evals_[i].gradient[static_cast<Eigen::Index>(a)];
      }
    }
    if (n_ <= 64) return dense_direction(t, grad);
    return sparse_direction(t, grad);
  }

  Eigen::VectorXd dense_direction(double t, const Eigen::VectorXd& grad) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_, n_);
    auto add = [&h](int r, int c, double v) { h(r, c) += v; };
    for (size_t i = 0; i < p_.objective.size(); ++i) {
      add_hessian(p_.objective[i], objective_evals_[i], t, add);
    }
    for (size_t i = 0; i < p_.constraints.size(); ++i) {
      const auto& e = constraint_evals_[i];
      const double inv = -1.0 / e.value;
      add_hessian(p_.constraints[i], e, inv, add);
      add_outer(p_.constraints[i], e, inv * inv, add);
    }
    const double diag_scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    double reg = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h + reg * Eigen::MatrixXd::Identity(n_, n_));
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        Eigen::VectorXd dx = ldlt.solve(-grad);
        if (dx.allFinite()) return dx;
      }
      reg = reg == 0.0 ? 1e-14 * diag_scale : reg * 100.0;
    }
    return -grad / diag_scale;
  }

  Eigen::VectorXd sparse_direction(double t, const Eigen::VectorXd& grad) {
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<size_t>(n_) * 8);
    auto add = [&triplets](int r, int c, double v) { triplets.emplace_back(r, c, v); };
    for (int k = 0; k < n_; ++k) add(k, k, 0.0);
    Eigen::MatrixXd low_rank(n_, wide_);
    int col = 0;
    for (size_t i = 0; i < p_.objective.size(); ++i) {
      add_hessian(p_.objective[i], objective_evals_[i], t, add);
    }
    for (size_t i = 0; i < p_.constraints.size(); ++i) {
      const auto& term = p_.constraints[i];
      const auto& e = constraint_evals_[i];
      const double inv = -1.0 / e.value;
      add_hessian(term, e, inv, add);
      if (static_cast<int>(term.vars.size()) > o_.low_rank_width) {
        low_rank.col(col).setZero();
        for (size_t a = 0; a < term.vars.size(); ++a) {
          low_rank(term.vars[a], col) = inv * e.gradient[static_cast<Eigen::Index>(a)];
        }
        ++col;
      } else {
        add_outer(term, e, inv * inv, add);
      }
    }
    SparseMatrix h(n_, n_);
    h.setFromTriplets(triplets.begin(), triplets.end());
    double diag_scale = 1.0;
    for (int k = 0; k < n_; ++k) diag_scale = std::max(diag_scale, std::abs(h.coeff(k, k)));

    // The pattern is identical on every Newton step; analyze it once.
    if (!analyzed_) {
      ldlt_.analyzePattern(h);
      analyzed_ = true;
    }
    double reg = 0.0;
    auto& ldlt = ldlt_;
    for (int attempt = 0; attempt < 8; ++attempt) {
      SparseMatrix hr = h;
      if (reg > 0.0) {
        for (int k = 0; k < n_; ++k) hr.coeffRef(k, k) += reg;
      }
      ldlt.factorize(hr);
      bool ok = ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all();
      if (ok) {
        Eigen::VectorXd y = ldlt.solve(-grad);
        if (wide_ > 0) {
          // (H + U U')^{-1} b = y - Z (I + U'Z)^{-1} U'y with Z = H^{-1} U.
          const Eigen::MatrixXd z = ldlt.solve(low_rank);
          Eigen::MatrixXd cap = low_rank.transpose() * z;
          cap.diagonal().array() += 1.0;
          y -= z * cap.ldlt().solve(low_rank.transpose() * y);
        }
        if (y.allFinite()) return y;
      }
      reg = reg == 0.0 ? 1e-14 * diag_scale : reg * 100.0;
    }
    return -grad / diag_scale;
  }

  const SmoothConvexProgram& p_;
  const BarrierOptions& o_;
  int n_ = 0;
  int m_ = 0;
  int wide_ = 0;
  std::vector<TermEval> objective_evals_;
  std::vector<TermEval> constraint_evals_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  bool analyzed_ = false;
};

}  // namespace

BarrierOutcome solve_barrier(const SmoothConvexProgram& p, const BarrierOptions& options) {
  return BarrierSolver(p, options).run();
}

}  // namespace outage
