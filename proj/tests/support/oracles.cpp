#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "outage/barrier.hpp"
#include "outage/channel.hpp"

namespace oracle {

Scenario random_scenario(std::mt19937_64& rng, const RandomScenarioOptions& o) {
  std::uniform_real_distribution<double> pos(0.0, o.side);
  std::uniform_real_distribution<double> dbm(o.p_min_dbm, o.p_max_dbm);
  outage::ScenarioSpec spec;
  for (int k = 0; k < o.sensors; ++k) {
    outage::SensorSite site;
    site.id = k + 1;
    site.position = Vec2(pos(rng), pos(rng));
    site.avg_power_budget = outage::dbm_to_watts(dbm(rng));
    spec.sensors.push_back(site);
  }
  spec.altitude = 50.0;
  spec.ref_gain = 1e-3;
  spec.path_loss_exp = 2.8;
  spec.noise_power = 1e-9;
  spec.snr_threshold = o.gamma;
  spec.v_max = 40.0;
  spec.start = Vec2(0.0, 0.0);
  spec.finish = Vec2(o.side, o.side);
  spec.duration = o.spare_time * (spec.finish - spec.start).norm() / spec.v_max + 1.0;
  spec.slots = o.slots;
  return Scenario::create(spec);
}

double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Eigen::VectorXd min_cost_powers_barrier(const Eigen::VectorXd& mu, const Eigen::VectorXd& gains,
                                        double gamma_sigma2, const Eigen::VectorXd& caps) {
  const int k = static_cast<int>(mu.size());
  // Scale powers so the threshold reads 1.
  const double unit = gamma_sigma2 / gains.maxCoeff();
  const Eigen::VectorXd g = gains * unit / gamma_sigma2;
  const Eigen::VectorXd c = mu * unit;

  outage::SmoothConvexProgram p;
  p.dimension = k;
  std::vector<int> all(static_cast<size_t>(k));
  std::iota(all.begin(), all.end(), 0);
  p.objective.push_back(outage::affine_term(all, c, 0.0));
  // 1 - sum_k sqrt(P_k g_k) <= 0, convex since sqrt is concave.
  outage::ConvexTerm reach;
  reach.vars = all;
  reach.fn = [g](const Eigen::VectorXd& x, outage::TermEval& out, bool derivatives) {
    if ((x.array() <= 0.0).any()) return false;
    const Eigen::ArrayXd r = (x.array() * g.array()).sqrt();
    out.value = 1.0 - r.sum();
    if (derivatives) {
      out.gradient = -(0.5 * r / x.array()).matrix();
      out.hessian = (0.25 * r / (x.array() * x.array())).matrix();
      out.diagonal_hessian = true;
    }
    return true;
  };
  p.constraints.push_back(reach);
  for (int i = 0; i < k; ++i) {
    p.constraints.push_back(outage::affine_term({i}, Eigen::VectorXd::Constant(1, -1.0), 0.0));
  }
  p.start = Eigen::VectorXd::Constant(k, 4.0 / g.minCoeff());
  if (caps.size() == k) {
    const Eigen::VectorXd c = caps / unit;
    for (int i = 0; i < k; ++i) {
      p.constraints.push_back(outage::affine_term({i}, Eigen::VectorXd::Ones(1), -c[i]));
    }
    const double reach = (c.array() * g.array()).sqrt().sum();
    if (!(reach > 1.0)) throw std::invalid_argument("caps cannot reach the threshold");
    const double theta = 0.5 * (1.0 + 1.0 / reach);
    p.start = theta * theta * c;
  }
  outage::BarrierOptions o;
  o.tolerance = 1e-13;
  o.max_newton_steps = 2000;
  const auto res = outage::solve_barrier(p, o);
  if (res.solution.size() != k) throw std::runtime_error("barrier oracle failed");
  return res.solution * unit;
}

double min_cost_value(const Eigen::VectorXd& mu, const Eigen::VectorXd& gains,
                      double gamma_sigma2) {
  return gamma_sigma2 / (gains.array() / mu.array()).sum();
}

double capped_min_cost(const Eigen::VectorXd& mu, const Eigen::VectorXd& gains,
                       double gamma_sigma2, const Eigen::VectorXd& caps) {
  const double denom = (gains.array() / mu.array()).sum();
  const Eigen::ArrayXd p = gamma_sigma2 * gains.array() / (mu.array() * mu.array() * denom * denom);
  if ((p <= caps.array()).all()) return gamma_sigma2 / denom;
  if ((caps.array() * gains.array()).sqrt().sum() <= std::sqrt(gamma_sigma2)) {
    return std::numeric_limits<double>::infinity();
  }
  return mu.dot(min_cost_powers_barrier(mu, gains, gamma_sigma2, caps));
}

int cheapest_grid_point(const Eigen::VectorXd& mu, const outage::GainField& field,
                        double gamma_sigma2, const Eigen::VectorXd& caps) {
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int i = 0; i < field.size(); ++i) {
    const double c = capped_min_cost(mu, field.gains().col(i), gamma_sigma2, caps);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  return best;
}

double single_sensor_relaxed_outage(const Scenario& s, const outage::GainField& field) {
  const double g = field.gains().row(0).maxCoeff();
  const double p_min = s.snr_threshold() * s.noise_power() / g;
  if (p_min > s.slots() * s.sensors()[0].avg_power_budget) return 1.0;
  return std::max(0.0, 1.0 - s.sensors()[0].avg_power_budget / p_min);
}

int single_sensor_max_served(const outage::Trajectory& tr, const Scenario& s, double energy) {
  std::vector<double> cost;
  for (int j = 0; j < tr.slots(); ++j) {
    const double g = outage::channel_gain(tr.slot_position(j), s.sensors()[0], s);
    cost.push_back(s.snr_threshold() * s.noise_power() / g);
  }
  std::sort(cost.begin(), cost.end());
  int served = 0;
  double used = 0.0;
  for (const double c : cost) {
    if (used + c > energy * (1.0 + 1e-9)) break;
    used += c;
    ++served;
  }
  return served;
}

double path_length(const Vec2& start, const std::vector<Vec2>& points,
                   const std::vector<int>& order, const Vec2& finish) {
  double len = 0.0;
  Vec2 at = start;
  for (const int i : order) {
    len += (points[static_cast<size_t>(i)] - at).norm();
    at = points[static_cast<size_t>(i)];
  }
  return len + (finish - at).norm();
}

std::vector<int> brute_force_order(const Vec2& start, const std::vector<Vec2>& points,
                                   const Vec2& finish) {
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> best = order;
  double best_len = std::numeric_limits<double>::infinity();
  do {
    const double len = path_length(start, points, order, finish);
    if (len < best_len) {
      best_len = len;
      best = order;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

double brute_force_min_outage(const Scenario& s, const outage::GainField& grid,
                              const std::vector<int>& levels, int budget_units) {
  const int n = s.slots();
  const int k_count = s.num_sensors();
  if (k_count != 2) throw std::invalid_argument("brute force is written for two sensors");
  const int g_count = grid.size();
  const double reach = s.max_step() * (1.0 + 1e-9);
  int finish = -1;
  for (int i = 0; i < g_count; ++i) {
    if ((grid.point(i) - s.finish()).norm() < 1e-9) finish = i;
  }
  if (finish < 0) throw std::invalid_argument("q_F is not a grid point");

  // served[i][l1][l2]: does transmitting levels (l1, l2) at grid point i meet gamma?
  std::vector<double> unit(2);
  for (int k = 0; k < 2; ++k) unit[static_cast<size_t>(k)] = n * s.sensors()[static_cast<size_t>(k)].avg_power_budget / budget_units;
  const auto meets = [&](int i, int l1, int l2) {
    const Vec2& q = grid.point(i);
    const double a = std::sqrt(l1 * unit[0] * outage::channel_gain(q, s.sensors()[0], s)) +
                     std::sqrt(l2 * unit[1] * outage::channel_gain(q, s.sensors()[1], s));
    return a * a / s.noise_power() >= s.snr_threshold();
  };

  const int e = budget_units + 1;
  const auto idx = [&](int i, int e1, int e2) { return (i * e + e1) * e + e2; };
  constexpr int kUnreachable = -1;
  std::vector<int> best(static_cast<size_t>(g_count * e * e), kUnreachable);
  // Slot 1 from q_I.
  for (int i = 0; i < g_count; ++i) {
    if ((grid.point(i) - s.start()).norm() > reach) continue;
    if (n == 1 && i != finish) continue;
    for (const int l1 : levels) {
      for (const int l2 : levels) {
        if (l1 > budget_units || l2 > budget_units) continue;
        auto& v = best[static_cast<size_t>(idx(i, l1, l2))];
        v = std::max(v, meets(i, l1, l2) ? 1 : 0);
      }
    }
  }
  for (int slot = 2; slot <= n; ++slot) {
    std::vector<int> next(best.size(), kUnreachable);
    for (int i = 0; i < g_count; ++i) {
      for (int j = 0; j < g_count; ++j) {
        if ((grid.point(i) - grid.point(j)).norm() > reach) continue;
        if (slot == n && j != finish) continue;
        for (const int l1 : levels) {
          for (const int l2 : levels) {
            const int gain = meets(j, l1, l2) ? 1 : 0;
            for (int e1 = 0; e1 + l1 <= budget_units; ++e1) {
              for (int e2 = 0; e2 + l2 <= budget_units; ++e2) {
                const int from = best[static_cast<size_t>(idx(i, e1, e2))];
                if (from == kUnreachable) continue;
                auto& to = next[static_cast<size_t>(idx(j, e1 + l1, e2 + l2))];
                to = std::max(to, from + gain);
              }
            }
          }
        }
      }
    }
    best.swap(next);
  }
  int served = kUnreachable;
  for (int e1 = 0; e1 <= budget_units; ++e1) {
    for (int e2 = 0; e2 <= budget_units; ++e2) {
      served = std::max(served, best[static_cast<size_t>(idx(finish, e1, e2))]);
    }
  }
  if (served == kUnreachable) throw std::invalid_argument("q_F unreachable on the grid");
  return 1.0 - static_cast<double>(served) / n;
}

}  // namespace oracle
