#include "outage/relaxed.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "outage/barrier.hpp"
#include "outage/channel.hpp"
#include "outage/linear_program.hpp"

namespace outage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double per_instant_cap(const Scenario& s, int k) {
  return s.slots() * s.sensors()[static_cast<size_t>(k)].avg_power_budget;
}

// Degenerate problem (14): zero-price sensors are free, priced sensors pay
// mu_k P_k, every sensor capped at N P^ave. Solved with the barrier method.
Eigen::VectorXd degenerate_powers(const DualPoint& mu, const Eigen::VectorXd& gains,
                                  const Scenario& s) {
  const int k_count = s.num_sensors();
  const double sigma = s.noise_amplitude();
  const double target = std::sqrt(s.snr_threshold());

  std::vector<int> sensor_of;
  Eigen::VectorXd capped(k_count);
  double reach = 0.0;
  for (int k = 0; k < k_count; ++k) {
    capped[k] = per_instant_cap(s, k);
    if (capped[k] > 0.0 && gains[k] > 0.0) {
      sensor_of.push_back(k);
      reach += std::sqrt(capped[k] * gains[k]) / sigma;
    }
  }
  const int n = static_cast<int>(sensor_of.size());
  // Unreachable even at the caps: every sensor at its cap, threshold missed.
  if (n == 0 || reach <= target * (1.0 + 1e-12)) return capped;

  // Every sensor at the same fraction of its cap, halfway between the
  // threshold and the caps.
  const double theta = 0.5 * (1.0 + target / reach);
  Eigen::VectorXd start(n);
  for (int i = 0; i < n; ++i) start[i] = theta * std::sqrt(capped[sensor_of[static_cast<size_t>(i)]]);

  SmoothConvexProgram p;
  p.dimension = n;
  p.start = start;
  {
    std::vector<int> vars;
    std::vector<double> weights;
    for (int i = 0; i < n; ++i) {
      const int k = sensor_of[static_cast<size_t>(i)];
      if (mu[k] > kMuEpsilon) {
        vars.push_back(i);
        weights.push_back(mu[k]);
      }
    }
    if (!vars.empty()) {
      const auto m = static_cast<Eigen::Index>(vars.size());
      Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
      for (Eigen::Index a = 0; a < m; ++a) q(a, a) = weights[static_cast<size_t>(a)];
      p.objective.push_back(quadratic_term(std::move(vars), q, Eigen::VectorXd::Zero(m), 0.0));
    }
  }
  {
    std::vector<int> vars(static_cast<size_t>(n));
    std::iota(vars.begin(), vars.end(), 0);
    Eigen::VectorXd coeffs(n);
    for (int i = 0; i < n; ++i) coeffs[i] = -std::sqrt(gains[sensor_of[static_cast<size_t>(i)]]) / sigma;
    p.constraints.push_back(affine_term(std::move(vars), coeffs, target));
  }
  for (int i = 0; i < n; ++i) {
    const int k = sensor_of[static_cast<size_t>(i)];
    p.constraints.push_back(affine_term({i}, Eigen::VectorXd::Constant(1, -1.0), 0.0));
    p.constraints.push_back(
        affine_term({i}, Eigen::VectorXd::Constant(1, 1.0), -std::sqrt(capped[k])));
  }
  BarrierOptions options;
  options.tolerance = 1e-12;
  options.max_newton_steps = 400;
  const BarrierOutcome out = solve_barrier(p, options);

  Eigen::VectorXd powers = Eigen::VectorXd::Zero(k_count);
  for (int i = 0; i < n; ++i) {
    const double rho = std::max(out.solution[i], 0.0);
    powers[sensor_of[static_cast<size_t>(i)]] = rho * rho;
  }
  return powers;
}

// Priced sensors covering an amplitude deficit at least cost, each capped
// at N P^ave: min sum mu_k r_k^2 s.t. sum h_k r_k >= deficit, 0 <= r_k <= c_k
// with h_k = sqrt(g_k) / (sigma sqrt(gamma)). Water-filling: r_k =
// min(c_k, lambda h_k / mu_k). Returns +inf when the caps cannot cover it.
struct Allocation {
  Eigen::VectorXd powers;
  double cost = 0.0;
};

Allocation water_fill(const DualPoint& mu, const Eigen::VectorXd& gains, const Scenario& s,
                      double deficit) {
  const int k_count = s.num_sensors();
  const double amp_unit = s.noise_amplitude() * std::sqrt(s.snr_threshold());
  Allocation out;
  out.powers = Eigen::VectorXd::Zero(k_count);
  if (deficit <= 0.0) return out;

  struct Entry {
    int k;
    double h, c, breakpoint;
  };
  std::vector<Entry> priced;
  double reach = 0.0;
  for (int k = 0; k < k_count; ++k) {
    const double h = std::sqrt(gains[k]) / amp_unit;
    const double c = std::sqrt(per_instant_cap(s, k));
    if (!(mu[k] > kMuEpsilon) || h == 0.0 || c == 0.0) continue;
    priced.push_back({k, h, c, c * mu[k] / h});
    reach += h * c;
  }
  if (reach < deficit * (1.0 - 1e-12)) {
    out.cost = kInf;
    return out;
  }
  std::stable_sort(priced.begin(), priced.end(),
                   [](const Entry& a, const Entry& b) { return a.breakpoint < b.breakpoint; });
  double slope = 0.0;
  for (const auto& e : priced) slope += e.h * e.h / mu[e.k];
  double capped_amp = 0.0;
  double lambda = 0.0;
  size_t j = 0;
  for (; j < priced.size(); ++j) {
    lambda = (deficit - capped_amp) / slope;
    if (lambda <= priced[j].breakpoint) break;
    capped_amp += priced[j].h * priced[j].c;
    slope -= priced[j].h * priced[j].h / mu[priced[j].k];
  }
  for (size_t i = 0; i < priced.size(); ++i) {
    const auto& e = priced[i];
    const double r = i < j ? e.c : std::min(e.c, lambda * e.h / mu[e.k]);
    out.powers[e.k] = r * r;
    out.cost += mu[e.k] * r * r;
  }
  return out;
}

bool cap_binds(const Eigen::VectorXd& p, const Scenario& s) {
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] > per_instant_cap(s, static_cast<int>(k))) return true;
  }
  return false;
}

}  // namespace

DualPoint::DualPoint(Eigen::VectorXd mu) : mu_(std::move(mu)) {
  if (!mu_.allFinite() || (mu_.array() < 0.0).any()) {
    throw std::invalid_argument("dual point must be finite and non-negative");
  }
}

Eigen::VectorXd kkt_powers(const DualPoint& mu, const Eigen::VectorXd& gains, const Scenario& s) {
  if (mu.size() != s.num_sensors() || gains.size() != s.num_sensors()) {
    throw DimensionMismatch("price / gain vectors do not match the sensor count");
  }
  const double denom = (gains.array() / mu.values().array()).sum();
  const double sigma = s.noise_amplitude();
  Eigen::VectorXd p(gains.size());
  for (Eigen::Index k = 0; k < gains.size(); ++k) {
    const double rho = std::sqrt(s.snr_threshold() * gains[k]) * sigma / (denom * mu[k]);
    p[k] = rho * rho;
  }
  return p;
}

double transmit_cost(const DualPoint& mu, const Eigen::VectorXd& gains, const Scenario& s) {
  const double need_power = s.snr_threshold() * s.noise_power();
  if (!mu.degenerate()) {
    const Eigen::VectorXd p = kkt_powers(mu, gains, s);
    if (!cap_binds(p, s)) return need_power / (gains.array() / mu.values().array()).sum();
    return water_fill(mu, gains, s, 1.0).cost;
  }
  // Free sensors at their caps contribute amplitude for nothing; priced
  // sensors cover the rest.
  const double amp_unit = s.noise_amplitude() * std::sqrt(s.snr_threshold());
  double free_amplitude = 0.0;
  for (Eigen::Index k = 0; k < gains.size(); ++k) {
    if (!(mu[k] > kMuEpsilon)) {
      free_amplitude += std::sqrt(per_instant_cap(s, static_cast<int>(k)) * gains[k]) / amp_unit;
    }
  }
  return water_fill(mu, gains, s, 1.0 - free_amplitude).cost;
}

Eigen::VectorXd powers_from_gains(const DualPoint& mu, const Eigen::VectorXd& gains,
                                  const Scenario& s) {
  if (mu.size() != s.num_sensors() || gains.size() != s.num_sensors()) {
    throw DimensionMismatch("price / gain vectors do not match the sensor count");
  }
  if (mu.degenerate()) return degenerate_powers(mu, gains, s);
  const Eigen::VectorXd p = kkt_powers(mu, gains, s);
  if (!cap_binds(p, s)) return p;
  const Allocation a = water_fill(mu, gains, s, 1.0);
  if (!std::isfinite(a.cost)) {
    Eigen::VectorXd caps(s.num_sensors());
    for (int k = 0; k < s.num_sensors(); ++k) caps[k] = per_instant_cap(s, k);
    return caps;
  }
  return a.powers;
}

Eigen::VectorXd powers_given_location(const DualPoint& mu, const Vec2& q, const Scenario& s) {
  return powers_from_gains(mu, channel_gains(q, s), s);
}

namespace {

// Transmit cost at every grid point.
Eigen::VectorXd grid_costs(const DualPoint& mu, const Scenario& s, const GainField& field) {
  const Eigen::MatrixXd& g = field.gains();
  Eigen::VectorXd costs(field.size());
  if (!mu.degenerate()) {
    const Eigen::VectorXd inv_mu = mu.values().cwiseInverse();
    const Eigen::VectorXd denom = g.transpose() * inv_mu;
    const double need_power = s.snr_threshold() * s.noise_power();
    costs = need_power * denom.cwiseInverse();
    // Largest P_k / cap_k at each point, P_k = need g_k / (mu_k denom)^2.
    Eigen::VectorXd w(s.num_sensors());
    for (int k = 0; k < s.num_sensors(); ++k) {
      const double cap = per_instant_cap(s, k);
      w[k] = cap > 0.0 ? need_power / (mu[k] * mu[k] * cap) : kInf;
    }
    for (int i = 0; i < field.size(); ++i) {
      const double d2 = denom[i] * denom[i];
      bool binds = false;
      for (int k = 0; k < s.num_sensors() && !binds; ++k) binds = g(k, i) * w[k] > d2;
      if (binds) costs[i] = transmit_cost(mu, g.col(i), s);
    }
    return costs;
  }
  for (int i = 0; i < field.size(); ++i) costs[i] = transmit_cost(mu, g.col(i), s);
  return costs;
}

}  // namespace

SubproblemSolution solve_pointwise_subproblem(const DualPoint& mu, const Scenario& s,
                                              const GainField& field) {
  if (mu.size() != s.num_sensors()) throw DimensionMismatch("price vector size");
  const Eigen::VectorXd costs = grid_costs(mu, s, field);
  int best = 0;
  for (int i = 1; i < field.size(); ++i) {
    if (costs[i] < costs[best]) best = i;
  }
  SubproblemSolution sol;
  if (costs[best] < 1.0) {
    sol.branch = SubproblemBranch::kTransmit;
    sol.location = field.point(best);
    sol.grid_index = best;
    sol.powers = powers_from_gains(mu, field.gains().col(best), s);
    sol.value = costs[best];
  } else {
    sol.branch = SubproblemBranch::kOutage;
    sol.powers = Eigen::VectorXd::Zero(s.num_sensors());
    sol.value = 1.0;
  }
  return sol;
}

SubproblemSolution solve_pointwise_subproblem(const DualPoint& mu, const Scenario& s,
                                              const GridSpec& grid) {
  return solve_pointwise_subproblem(mu, s, GainField(s, grid));
}

DualEvaluation dual_function(const DualPoint& mu, const Scenario& s, const GainField& field) {
  DualEvaluation ev;
  ev.subproblem = solve_pointwise_subproblem(mu, s, field);
  const Eigen::VectorXd budgets = s.power_budgets();
  ev.value = ev.subproblem.value - mu.values().dot(budgets);
  ev.subgradient = ev.subproblem.powers - budgets;
  return ev;
}

DualEvaluation dual_function(const DualPoint& mu, const Scenario& s, const GridSpec& grid) {
  return dual_function(mu, s, GainField(s, grid));
}

double dual_box_bound(const Scenario& s) {
  const double min_budget = s.power_budgets().minCoeff();
  if (!(min_budget > 0.0)) {
    // A zero budget makes its price unbounded; fall back to the largest
    // useful scale among the positive budgets.
    const Eigen::VectorXd b = s.power_budgets();
    double positive_min = kInf;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      if (b[k] > 0.0) positive_min = std::min(positive_min, b[k]);
    }
    return std::isfinite(positive_min) ? 2.0 / positive_min : 1.0;
  }
  return 2.0 / min_budget;
}

namespace {

struct OracleValue {
  double value = 0.0;
  Eigen::VectorXd supergradient;
};

// Central-cut ellipsoid maximization of a concave function over
// {mu >= 0, cut_normal . mu <= 1 (if given)} starting from the ball around
// [0, box]^n. `start` seeds the incumbent.
DualMaximum ellipsoid_maximize(int n, double box, const std::function<OracleValue(const DualPoint&)>& f,
                               const Eigen::VectorXd* cut_normal, const DualPoint& start,
                               const EllipsoidOptions& options) {
  DualMaximum best;
  best.mu = start;
  best.value = f(start).value;
  double upper = kInf;  // certified bound on the maximum

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.5 * box);
  const double radius = 0.5 * box * std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n, n) * radius * radius;
  double log_volume_ratio = 0.0;  // log(vol / vol0)
  const double dim = n;
  const double shrink_log =
      n > 1 ? 0.5 * (dim * std::log(dim * dim / (dim * dim - 1.0)) +
                     std::log(1.0 - 2.0 / (dim + 1.0)))
            : std::log(0.5);
  const double stop_log_volume = dim * std::log(options.axis_ratio);

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    // `cut` is a direction along which the target set lies in cut' (y - x) <= 0.
    Eigen::VectorXd cut(n);
    Eigen::Index worst = 0;
    if (x.minCoeff(&worst) < 0.0) {
      cut.setZero();
      cut[worst] = -1.0;
    } else if (cut_normal != nullptr && cut_normal->dot(x) > 1.0) {
      cut = *cut_normal;
    } else {
      const DualPoint mu(x);
      const OracleValue ev = f(mu);
      cut = -ev.supergradient;
      const double spread = std::sqrt(std::max(cut.dot(e * cut), 0.0));
      upper = std::min(upper, ev.value + spread);
      if (ev.value > best.value) {
        best.value = ev.value;
        best.mu = mu;
      }
      if (upper - best.value <= options.gap_tolerance) break;
      if (cut.squaredNorm() == 0.0) break;  // zero supergradient: optimal
    }
    const double norm2 = cut.dot(e * cut);
    if (!(norm2 > 0.0)) break;
    const Eigen::VectorXd ge = e * cut / std::sqrt(norm2);
    if (n == 1) {
      // The 1-D ellipsoid is an interval; a central cut halves it.
      x -= 0.5 * ge;
      e *= 0.25;
    } else {
      x -= ge / (dim + 1.0);
      e = (dim * dim / (dim * dim - 1.0)) * (e - (2.0 / (dim + 1.0)) * ge * ge.transpose());
      e = 0.5 * (e + e.transpose());
    }
    log_volume_ratio += shrink_log;
    if (log_volume_ratio < stop_log_volume) {
      ++it;
      break;
    }
  }
  best.iterations = it;
  best.gap_bound = std::max(0.0, upper - best.value);
  return best;
}

}  // namespace

DualMaximum maximize_dual(const Scenario& s, const GainField& field,
                          const EllipsoidOptions& options) {
  const int n = s.num_sensors();
  return ellipsoid_maximize(
      n, dual_box_bound(s),
      [&](const DualPoint& mu) {
        DualEvaluation ev = dual_function(mu, s, field);
        return OracleValue{ev.value, ev.subgradient};
      },
      nullptr, DualPoint::zeros(n), options);
}

DualMaximum supporting_prices(const Scenario& s, const GainField& field,
                              const EllipsoidOptions& options) {
  const int n = s.num_sensors();
  const Eigen::VectorXd budgets = s.power_budgets();
  if (!(budgets.minCoeff() > 0.0)) {
    throw std::invalid_argument("supporting prices need positive budgets");
  }
  // Uniform prices on the slice as the seed.
  const DualPoint seed(Eigen::VectorXd::Constant(n, 1.0 / budgets.sum()));
  return ellipsoid_maximize(
      n, 1.0 / budgets.minCoeff(),
      [&](const DualPoint& mu) {
        const Eigen::VectorXd costs = grid_costs(mu, s, field);
        Eigen::Index best = 0;
        const double v = costs.minCoeff(&best);
        OracleValue out;
        out.value = v;
        out.supergradient = std::isfinite(v)
                                ? powers_from_gains(mu, field.gains().col(best), s)
                                : Eigen::VectorXd(Eigen::VectorXd::Zero(n));
        return out;
      },
      &budgets, seed, options);
}

DualMaximum maximize_dual(const Scenario& s, const GridSpec& grid, const EllipsoidOptions& options) {
  return maximize_dual(s, GainField(s, grid), options);
}

double HoverPlan::total_hover_time() const {
  return std::accumulate(durations.begin(), durations.end(), 0.0);
}

namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[static_cast<size_t>(i)] != i) {
    parent[static_cast<size_t>(i)] = parent[static_cast<size_t>(parent[static_cast<size_t>(i)])];
    i = parent[static_cast<size_t>(i)];
  }
  return i;
}

}  // namespace

HoverPlan build_hover_plan(const DualPoint& mu_opt, const Scenario& s, const GainField& field,
                           const HoverPlanOptions& options) {
  if (mu_opt.size() != s.num_sensors()) throw DimensionMismatch("price vector size");
  const double floor = options.price_floor * dual_box_bound(s);
  const DualPoint mu(mu_opt.values().cwiseMax(floor));

  HoverPlan plan;
  plan.horizon = s.duration();

  const Eigen::VectorXd costs = grid_costs(mu, s, field);
  const double best = costs.minCoeff();
  std::vector<int> ties;
  if (best <= 1.0 + options.tie_tolerance) {
    const double limit = best * (1.0 + options.tie_tolerance);
    for (int i = 0; i < field.size(); ++i) {
      if (costs[i] <= limit) ties.push_back(i);
    }
  }

  // Single-linkage clustering of the tie set.
  std::vector<int> parent(ties.size());
  std::iota(parent.begin(), parent.end(), 0);
  const double radius = options.cluster_steps * field.max_step() * (1.0 + 1e-9);
  for (size_t a = 0; a < ties.size(); ++a) {
    for (size_t b = a + 1; b < ties.size(); ++b) {
      if ((field.point(ties[a]) - field.point(ties[b])).norm() <= radius) {
        parent[static_cast<size_t>(find_root(parent, static_cast<int>(a)))] =
            find_root(parent, static_cast<int>(b));
      }
    }
  }
  for (int idx : ties) {
    HoverCandidate cand;
    cand.location = field.point(idx);
    cand.powers = powers_from_gains(mu, field.gains().col(idx), s);
    plan.candidates.push_back(std::move(cand));
  }

  const int v = static_cast<int>(plan.candidates.size());
  plan.durations.assign(static_cast<size_t>(v), 0.0);
  if (v > 0) {
    const int k_count = s.num_sensors();
    LinearProgram lp;
    lp.objective = Eigen::VectorXd::Constant(v, -1.0 / s.duration());
    lp.inequality_matrix = Eigen::MatrixXd::Zero(k_count + 1, v);
    lp.inequality_rhs = Eigen::VectorXd::Zero(k_count + 1);
    for (int c = 0; c < v; ++c) {
      lp.inequality_matrix.col(c).head(k_count) = plan.candidates[static_cast<size_t>(c)].powers;
      lp.inequality_matrix(k_count, c) = 1.0;
    }
    lp.inequality_rhs.head(k_count) = s.duration() * s.power_budgets();
    lp.inequality_rhs[k_count] = s.duration();
    const SolveOutcome out = solve_lp(lp);
    if (!out.optimal()) {
      throw std::logic_error(std::string("hover-duration LP returned ") + to_string(out.status));
    }
    for (int c = 0; c < v; ++c) plan.durations[static_cast<size_t>(c)] = std::max(0.0, out.solution[c]);
  }

  // Clusters are numbered in order of their first (row-major) member.
  std::vector<int> cluster_of(ties.size(), -1);
  for (size_t a = 0; a < ties.size(); ++a) {
    const auto root = static_cast<size_t>(find_root(parent, static_cast<int>(a)));
    if (cluster_of[root] < 0) {
      cluster_of[root] = static_cast<int>(plan.clusters.size());
      plan.clusters.emplace_back();
    }
    HoverCluster& c = plan.clusters[static_cast<size_t>(cluster_of[root])];
    c.members.push_back(static_cast<int>(a));
    c.location += plan.candidates[a].location;
    c.duration += plan.durations[a];
  }
  for (auto& c : plan.clusters) c.location /= static_cast<double>(c.members.size());
  // A cluster the LP gives no time is not a hover location.
  std::erase_if(plan.clusters, [&](const HoverCluster& c) {
    return !(c.duration > 1e-9 * s.duration());
  });

  plan.outage_duration = std::max(0.0, s.duration() - plan.total_hover_time());
  plan.outage_probability = plan.outage_duration / s.duration();
  return plan;
}

HoverPlan build_hover_plan(const DualPoint& mu_opt, const Scenario& s, const GridSpec& grid,
                           const HoverPlanOptions& options) {
  return build_hover_plan(mu_opt, s, GainField(s, grid), options);
}

RelaxedSolution solve_relaxed(const Scenario& s, const GridSpec& grid,
                              const EllipsoidOptions& options) {
  const GainField field(s, grid);
  RelaxedSolution out;
  out.dual = maximize_dual(s, field, options);
  out.plan_prices = out.dual.mu;
  if (out.dual.value <= options.gap_tolerance && s.power_budgets().minCoeff() > 0.0) {
    // Zero-outage regime: the dual is flat at mu = 0 and the prices that
    // support the time-sharing are found on the slice mu . P^ave = 1.
    out.plan_prices = supporting_prices(s, field, options).mu;
  }
  out.plan = build_hover_plan(out.plan_prices, s, field);
  return out;
}

}  // namespace outage
