#include "outage/schemes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "outage/channel.hpp"
#include "outage/csv.hpp"

namespace outage {

const char* to_string(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::kFlyHoverFly: return "fly_hover_fly";
    case BenchmarkKind::kPowerOnly: return "power_only";
    case BenchmarkKind::kTrajectoryOnly: return "trajectory_only";
  }
  return "unknown";
}

std::optional<BenchmarkKind> parse_benchmark_kind(std::string_view text) {
  for (auto k : {BenchmarkKind::kFlyHoverFly, BenchmarkKind::kPowerOnly,
                 BenchmarkKind::kTrajectoryOnly}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("OUTAGE_PLANNER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 1024));
  }
  return hw;
}

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, count));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::optional<Trajectory> fly_hover_fly_trajectory(const Scenario& s, const Vec2& via) {
  const double in = (via - s.start()).norm() / s.v_max();
  const double out = (s.finish() - via).norm() / s.v_max();
  const double tol = feasibility_slack(in + out, s.duration());
  if (in + out > s.duration() + tol) return std::nullopt;
  const double leave = std::max(in, s.duration() - out);
  const int n = s.slots();
  Trajectory tr;
  tr.slot_length = s.slot_length();
  tr.waypoints.resize(static_cast<size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = s.slot_length() * i;
    Vec2 q;
    if (t <= in) {
      q = in > 0.0 ? Vec2(s.start() + (t / in) * (via - s.start())) : via;
    } else if (t <= leave) {
      q = via;
    } else {
      const double span = s.duration() - leave;
      const double f = span > 0.0 ? std::min(1.0, (t - leave) / span) : 1.0;
      q = via + f * (s.finish() - via);
    }
    tr.waypoints[static_cast<size_t>(i)] = q;
  }
  tr.waypoints.front() = s.start();
  tr.waypoints.back() = s.finish();
  return tr;
}


FlyHoverFlyResult run_fly_hover_fly(const Scenario& s, const GridSpec& grid,
                                    const RecoveryOptions& recovery) {
  const GainField field(s, grid);
  const PowerSchedule uniform = PowerSchedule::uniform(s);
  struct Candidate {
    int index;
    int bound;
    Trajectory tr;
    SlotRanking ranking;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < field.size(); ++i) {
    auto tr = fly_hover_fly_trajectory(s, field.point(i));
    if (!tr) continue;
    SlotRanking ranking = rank_slots(*tr, uniform, s);
    const int ub = servable_upper_bound(ranking, *tr, s, recovery.budget_norm);
    cands.push_back({i, ub, std::move(*tr), std::move(ranking)});
  }

  FlyHoverFlyResult best;
  if (cands.empty()) {
    static_cast<SchemeResult&>(best) = run_power_only(s, recovery);
    return best;
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.bound > b.bound; });

  // Serving `need` slots is what a candidate must reach to beat the incumbent.
  int best_served = -1;
  const auto need_for = [&](const Candidate& c) {
    return c.index < best.via_index ? best_served : best_served + 1;
  };
  const int workers = worker_count();
  size_t pos = 0;
  while (pos < cands.size()) {
    std::vector<size_t> batch;
    std::vector<int> needs;
    while (pos < cands.size() && static_cast<int>(batch.size()) < workers) {
      if (cands[pos].bound < best_served) {
        pos = cands.size();
        break;
      }
      const int need = need_for(cands[pos]);
      if (cands[pos].bound >= need) {
        batch.push_back(pos);
        needs.push_back(need);
      }
      ++pos;
    }
    std::vector<std::optional<RecoveryResult>> results(batch.size());
    parallel_for(static_cast<int>(batch.size()), workers, [&](int b) {
      const auto bi = static_cast<size_t>(b);
      const Candidate& c = cands[batch[bi]];
      // One probe at the winning count screens out most candidates.
      if (needs[bi] > 0 &&
          !feasibility_for_subset(needs[bi], c.ranking, c.tr, s, recovery).feasible) {
        return;
      }
      RecoveryOptions o = recovery;
      o.max_served = c.bound;
      results[bi] = recover_powers(c.tr, uniform, s, o);
    });
    for (size_t b = 0; b < batch.size(); ++b) {
      const Candidate& c = cands[batch[b]];
      ++best.evaluated;
      if (!results[b]) continue;
      const int served = results[b]->served_slots;
      if (served > best_served || (served == best_served && c.index < best.via_index)) {
        best_served = served;
        best.via_index = c.index;
        best.via = field.point(c.index);
        best.trajectory = c.tr;
        best.powers = results[b]->powers;
        best.outage = results[b]->outage;
      }
    }
  }
  return best;
}

SchemeResult run_power_only(const Scenario& s, const RecoveryOptions& recovery) {
  SchemeResult out;
  out.trajectory = direct_trajectory(s);
  const RecoveryResult rec = recover_powers(out.trajectory, PowerSchedule::uniform(s), s, recovery);
  out.powers = rec.powers;
  out.outage = rec.outage;
  return out;
}

SchemeResult run_trajectory_only(const Scenario& s, const InitTrajectory& init,
                                 const ScaOptions& options) {
  ScaOptions o = options;
  o.optimize_trajectory = true;
  o.optimize_powers = false;
  const ScaResult sca = plan_sca(s, init.trajectory, o);
  SchemeResult out;
  out.trajectory = sca.trajectory();
  out.powers = sca.powers();
  out.outage = outage_probability(out.trajectory, out.powers, s);
  return out;
}

ProposedResult run_proposed(const Scenario& s, const GridSpec& grid, const ScaOptions& sca,
                            const RecoveryOptions& recovery) {
  ProposedResult out;
  out.relaxed = solve_relaxed(s, grid);
  out.init = init_shf(s, out.relaxed.plan);
  out.sca = plan_sca(s, out.init.trajectory, sca);
  out.recovery = recover_powers(out.sca.trajectory(), out.sca.powers(), s, recovery);
  out.trajectory = out.sca.trajectory();
  out.powers = out.recovery.powers;
  out.outage = out.recovery.outage;
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  CsvWriter csv(out);
  csv.header({"scheme", "p_ave_dbm", "t_s", "outage"});
  for (const auto& r : rows) {
    csv.field(r.scheme).field(r.p_ave_dbm).field(r.t_s).field(r.outage);
    csv.end_row();
  }
}

}  // namespace outage
