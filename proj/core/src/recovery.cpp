#include "outage/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "outage/barrier.hpp"
#include "outage/channel.hpp"
#include "outage/csv.hpp"

namespace outage {

const char* to_string(BudgetNorm norm) {
  return norm == BudgetNorm::kHorizon ? "horizon" : "active_slots";
}

std::optional<BudgetNorm> parse_budget_norm(std::string_view text) {
  if (text == "horizon") return BudgetNorm::kHorizon;
  if (text == "active_slots") return BudgetNorm::kActiveSlots;
  return std::nullopt;
}

SlotRanking rank_slots(const Trajectory& tr, const PowerSchedule& ps, const Scenario& s) {
  SlotRanking r;
  r.snr = slot_snrs(tr, ps, s);
  r.order.resize(r.snr.size());
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(), [&](int a, int b) {
    return r.snr[static_cast<size_t>(a)] > r.snr[static_cast<size_t>(b)];
  });
  return r;
}

SubsetFeasibility feasibility_for_subset(int n_prime, const SlotRanking& ranking,
                                         const Trajectory& tr, const Scenario& s,
                                         const RecoveryOptions& options) {
  const int n = s.slots();
  const int k_count = s.num_sensors();
  if (n_prime < 0 || n_prime > n || static_cast<int>(ranking.order.size()) != n ||
      tr.slots() != n) {
    throw DimensionMismatch("served-slot count or ranking does not match the scenario");
  }
  SubsetFeasibility res;
  res.powers = PowerSchedule::zeros(k_count, n);
  if (n_prime == 0) {
    res.feasible = true;
    return res;
  }

  const Eigen::VectorXd budgets = s.power_budgets();
  const double energy_slots = options.budget_norm == BudgetNorm::kHorizon ? n : n_prime;
  std::vector<int> active;
  for (int k = 0; k < k_count; ++k) {
    if (budgets[k] > 0.0) active.push_back(k);
  }
  const int ka = static_cast<int>(active.size());
  if (ka == 0) {
    res.slack = 1.0;
    return res;
  }

  const double amp_unit = s.noise_amplitude() * std::sqrt(s.snr_threshold() *
                                                          (1.0 + options.threshold_margin));
  const int tvar = ka * n_prime;
  const auto rvar = [n_prime](int a, int i) { return a * n_prime + i; };

  Eigen::MatrixXd h(ka, n_prime);
  for (int i = 0; i < n_prime; ++i) {
    const Vec2& q = tr.slot_position(ranking.order[static_cast<size_t>(i)]);
    for (int a = 0; a < ka; ++a) {
      const auto& site = s.sensors()[static_cast<size_t>(active[static_cast<size_t>(a)])];
      h(a, i) = std::sqrt(channel_gain(q, site, s)) / amp_unit;
    }
  }

  SmoothConvexProgram p;
  p.dimension = tvar + 1;
  p.objective.push_back(affine_term({tvar}, Eigen::VectorXd::Ones(1), 0.0));
  for (int i = 0; i < n_prime; ++i) {
    // (1 - t) - sum_k rho h <= 0
    std::vector<int> vars;
    Eigen::VectorXd coeffs(ka + 1);
    for (int a = 0; a < ka; ++a) {
      vars.push_back(rvar(a, i));
      coeffs[a] = -h(a, i);
    }
    vars.push_back(tvar);
    coeffs[ka] = -1.0;
    p.constraints.push_back(affine_term(std::move(vars), coeffs, 1.0));
  }
  Eigen::VectorXd x(p.dimension);
  for (int a = 0; a < ka; ++a) {
    const double cap = energy_slots * budgets[active[static_cast<size_t>(a)]];
    std::vector<int> vars(static_cast<size_t>(n_prime));
    for (int i = 0; i < n_prime; ++i) {
      vars[static_cast<size_t>(i)] = rvar(a, i);
      p.constraints.push_back(affine_term({rvar(a, i)}, Eigen::VectorXd::Constant(1, -1.0), 0.0));
      x[rvar(a, i)] = 0.5 * std::sqrt(cap / n_prime);
    }
    p.constraints.push_back(squared_norm_term(std::move(vars), 1.0, -cap));
  }
  double worst = 0.0;
  for (int i = 0; i < n_prime; ++i) {
    double amp = 0.0;
    for (int a = 0; a < ka; ++a) amp += h(a, i) * x[rvar(a, i)];
    worst = std::max(worst, 1.0 - amp);
  }
  x[tvar] = worst + 1.0;
  p.start = x;

  BarrierOptions bo;
  bo.tolerance = 1e-10;
  bo.max_newton_steps = 400;
  bo.stop_below = 0.0;
  bo.stop_bound_above = options.feasibility_tolerance;
  const BarrierOutcome out = solve_barrier(p, bo);
  res.slack = out.solution.size() > 0 ? out.solution[tvar] : 1.0;
  if (!(res.slack <= options.feasibility_tolerance)) return res;

  for (int i = 0; i < n_prime; ++i) {
    const int slot = ranking.order[static_cast<size_t>(i)];
    for (int a = 0; a < ka; ++a) {
      const double r = std::max(0.0, out.solution[rvar(a, i)]);
      res.powers.powers(active[static_cast<size_t>(a)], slot) = r * r;
    }
  }
  // Exact check on the served slots.
  for (int i = 0; i < n_prime; ++i) {
    const int slot = ranking.order[static_cast<size_t>(i)];
    const SnrValue v = snr(tr.slot_position(slot), Eigen::VectorXd(res.powers.powers.col(slot)), s);
    if (outage_indicator(v, s.snr_threshold()) != 0) return res;
  }
  for (int k = 0; k < k_count; ++k) {
    if (res.powers.powers.row(k).sum() > n * budgets[k]) return res;
  }
  res.feasible = true;
  return res;
}

int servable_upper_bound(const SlotRanking& ranking, const Trajectory& tr, const Scenario& s,
                         BudgetNorm norm) {
  const int n = s.slots();
  const int k_count = s.num_sensors();
  if (static_cast<int>(ranking.order.size()) != n || tr.slots() != n) {
    throw DimensionMismatch("ranking does not match the scenario");
  }
  const Eigen::VectorXd budgets = s.power_budgets();
  const double need = s.noise_amplitude() * std::sqrt(s.snr_threshold());
  Eigen::VectorXd gain_sum = Eigen::VectorXd::Zero(k_count);
  int best = 0;
  for (int m = 1; m <= n; ++m) {
    const Vec2& q = tr.slot_position(ranking.order[static_cast<size_t>(m - 1)]);
    gain_sum += channel_gains(q, s);
    const double slots = norm == BudgetNorm::kHorizon ? n : m;
    double reach = 0.0;
    for (int k = 0; k < k_count; ++k) reach += std::sqrt(slots * budgets[k] * gain_sum[k]);
    if (m * need <= reach * (1.0 + 1e-9)) best = m;
  }
  return best;
}

namespace {

RecoveryResult recover_with(SlotRanking ranking, const Trajectory& tr, const Scenario& s,
                            const RecoveryOptions& options) {
  RecoveryResult out;
  out.ranking = std::move(ranking);
  std::map<int, SubsetFeasibility> solved;
  const auto probe = [&](int n_prime) {
    auto it = solved.find(n_prime);
    if (it == solved.end()) {
      it = solved.emplace(n_prime, feasibility_for_subset(n_prime, out.ranking, tr, s, options))
               .first;
    }
    return it->second.feasible;
  };
  const int hi = options.max_served ? std::clamp(*options.max_served, 0, s.slots()) : s.slots();
  out.search = bisect_max_feasible(0, hi, probe);
  out.served_slots = out.search.value;
  probe(out.served_slots);
  out.powers = solved.at(out.served_slots).powers;
  out.outage = outage_probability(tr, out.powers, s);
  return out;
}

}  // namespace

RecoveryResult recover_powers(const Trajectory& tr, const PowerSchedule& ps, const Scenario& s,
                              const RecoveryOptions& options) {
  RecoveryResult best = recover_with(rank_slots(tr, ps, s), tr, s, options);
  if (!options.uniform_ranking || best.served_slots == s.slots()) return best;
  SlotRanking uniform = rank_slots(tr, PowerSchedule::uniform(s), s);
  if (uniform.order == best.ranking.order) return best;
  RecoveryResult alt = recover_with(std::move(uniform), tr, s, options);
  return alt.served_slots > best.served_slots ? alt : best;
}

void write_schedule_csv(std::ostream& out, const Trajectory& tr, const PowerSchedule& ps,
                        const Scenario& s) {
  CsvWriter csv(out);
  std::vector<std::string> head = {"slot", "x", "y", "snr", "outage_flag"};
  for (int k = 1; k <= s.num_sensors(); ++k) head.push_back("p_" + std::to_string(k) + "_dbm");
  csv.header(head);
  const std::vector<double> snrs = slot_snrs(tr, ps, s);
  for (int j = 0; j < ps.slots(); ++j) {
    const Vec2& q = tr.slot_position(j);
    csv.field(j + 1).field(q.x()).field(q.y()).field(snrs[static_cast<size_t>(j)]);
    csv.field(outage_indicator(SnrValue(snrs[static_cast<size_t>(j)]), s.snr_threshold()));
    for (int k = 0; k < s.num_sensors(); ++k) {
      const double p = ps.powers(k, j);
      if (p > 0.0) {
        csv.field(watts_to_dbm(p));
      } else {
        csv.field(std::string_view());
      }
    }
    csv.end_row();
  }
}

}  // namespace outage
