#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "outage/channel.hpp"
#include "outage/hover_plan_io.hpp"
#include "outage/scenario_io.hpp"
#include "outage/schemes.hpp"

namespace outage::cli {
namespace {

using nlohmann::json;

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream buf;
  body(buf);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << buf.str();
  if (!f.flush()) throw IoError("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_file(path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

json plan_summary(const Trajectory& tr, const PowerSchedule& ps, const Scenario& s, double outage) {
  const PlanCheck check = validate_plan(s, tr, ps);
  const auto snrs = slot_snrs(tr, ps, s);
  int served = 0;
  for (const double v : snrs) served += outage_indicator(SnrValue(v), s.snr_threshold()) == 0;
  return json{{"outage", outage},
              {"served_slots", served},
              {"slots", s.slots()},
              {"feasible", check.feasible()}};
}

GridSpec grid_of(const RunRequest& req) {
  GridSpec g;
  g.resolution = req.grid;
  return g;
}

struct PointResult {
  double p_ave_dbm = 0.0;
  double t_s = 0.0;
  std::vector<std::pair<std::string, double>> outages;
};

// Every scheme plus the relaxed bound at one scenario.
PointResult run_all_schemes(const Scenario& s, const GridSpec& grid, const RecoveryOptions& rec,
                            double p_ave_dbm) {
  PointResult r;
  r.p_ave_dbm = p_ave_dbm;
  r.t_s = s.duration();
  const ProposedResult proposed = run_proposed(s, grid, {}, rec);
  r.outages.emplace_back("proposed", proposed.outage);
  r.outages.emplace_back("relaxed_bound", proposed.relaxed.plan.outage_probability);
  r.outages.emplace_back(to_string(BenchmarkKind::kFlyHoverFly),
                         run_fly_hover_fly(s, grid, rec).outage);
  r.outages.emplace_back(to_string(BenchmarkKind::kPowerOnly), run_power_only(s, rec).outage);
  r.outages.emplace_back(to_string(BenchmarkKind::kTrajectoryOnly),
                         run_trajectory_only(s, proposed.init).outage);
  return r;
}

std::vector<SweepRow> flatten(const std::vector<PointResult>& points) {
  std::vector<SweepRow> rows;
  for (const auto& p : points) {
    for (const auto& [scheme, outage] : p.outages) rows.push_back({scheme, p.p_ave_dbm, p.t_s, outage});
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.scheme, a.p_ave_dbm, a.t_s) < std::tie(b.scheme, b.p_ave_dbm, b.t_s);
  });
  return rows;
}

json rows_to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"scheme", r.scheme}, {"p_ave_dbm", r.p_ave_dbm}, {"t_s", r.t_s},
                   {"outage", r.outage}});
  }
  return arr;
}

double uniform_budget_dbm(const Scenario& s) {
  const Eigen::VectorXd b = s.power_budgets();
  if (b.size() > 0 && (b.array() == b[0]).all()) return watts_to_dbm(b[0]);
  return std::nan("");
}

void cmd_relaxed(const RunRequest& req, const Scenario& s, std::ostream& out) {
  const GridSpec grid = grid_of(req);
  const RelaxedSolution sol = solve_relaxed(s, grid);
  const GainField field(s, grid);
  const json plan = hover_plan_to_json(sol.plan);
  write_json(req.out_dir / "hover_plan.json", plan);
  write_json(req.out_dir / "relaxed.json", relaxed_solution_to_json(sol));
  write_file(req.out_dir / "cost_map.csv",
             [&](std::ostream& os) { write_cost_map_csv(os, sol.plan_prices, s, field); });
  out << plan.dump(2) << '\n';
}

void cmd_sca(const RunRequest& req, const Scenario& s, std::ostream& out) {
  const RelaxedSolution relaxed = solve_relaxed(s, grid_of(req));
  const InitTrajectory init = init_shf(s, relaxed.plan);
  const ScaResult sca = plan_sca(s, init.trajectory);
  const Trajectory tr = sca.trajectory();
  const PowerSchedule ps = sca.powers();
  write_file(req.out_dir / "sca_trace.csv",
             [&](std::ostream& os) { write_trace_csv(os, sca.state.trace); });
  write_file(req.out_dir / "sca_schedule.csv",
             [&](std::ostream& os) { write_schedule_csv(os, tr, ps, s); });
  json doc = plan_summary(tr, ps, s, outage_probability(tr, ps, s));
  doc["init"] = to_string(init.kind);
  doc["rounds"] = sca.rounds;
  doc["converged"] = sca.converged;
  doc["objective"] = sca.state.objective(s);
  write_json(req.out_dir / "sca_summary.json", doc);
  out << doc.dump(2) << '\n';
}

void cmd_recover(const RunRequest& req, const Scenario& s, std::ostream& out) {
  RecoveryOptions rec;
  rec.budget_norm = req.budget_norm;
  const ProposedResult r = run_proposed(s, grid_of(req), {}, rec);
  write_file(req.out_dir / "sca_trace.csv",
             [&](std::ostream& os) { write_trace_csv(os, r.sca.state.trace); });
  write_file(req.out_dir / "schedule.csv",
             [&](std::ostream& os) { write_schedule_csv(os, r.trajectory, r.powers, s); });
  json doc = plan_summary(r.trajectory, r.powers, s, r.outage);
  doc["relaxed_bound"] = r.relaxed.plan.outage_probability;
  doc["init"] = to_string(r.init.kind);
  doc["sca_rounds"] = r.sca.rounds;
  doc["budget_norm"] = to_string(req.budget_norm);
  write_json(req.out_dir / "recover_summary.json", doc);
  out << doc.dump(2) << '\n';
}

void cmd_benchmark(const RunRequest& req, const Scenario& s, std::ostream& out) {
  std::vector<BenchmarkKind> kinds;
  if (req.scheme == "all") {
    kinds = {BenchmarkKind::kFlyHoverFly, BenchmarkKind::kPowerOnly,
             BenchmarkKind::kTrajectoryOnly};
  } else if (auto k = parse_benchmark_kind(req.scheme)) {
    kinds = {*k};
  } else {
    throw UsageError("unknown scheme '" + req.scheme + "'");
  }
  RecoveryOptions rec;
  rec.budget_norm = req.budget_norm;
  const GridSpec grid = grid_of(req);
  json doc = json::object();
  for (const BenchmarkKind k : kinds) {
    SchemeResult r;
    json extra = json::object();
    switch (k) {
      case BenchmarkKind::kFlyHoverFly: {
        const FlyHoverFlyResult f = run_fly_hover_fly(s, grid, rec);
        r = f;
        if (f.via_index >= 0) extra["via"] = {f.via.x(), f.via.y()};
        break;
      }
      case BenchmarkKind::kPowerOnly:
        r = run_power_only(s, rec);
        break;
      case BenchmarkKind::kTrajectoryOnly:
        r = run_trajectory_only(s, init_shf(s, solve_relaxed(s, grid).plan));
        break;
    }
    const std::string name = to_string(k);
    write_file(req.out_dir / ("schedule_" + name + ".csv"),
               [&](std::ostream& os) { write_schedule_csv(os, r.trajectory, r.powers, s); });
    json entry = plan_summary(r.trajectory, r.powers, s, r.outage);
    entry.update(extra);
    doc[name] = entry;
  }
  write_json(req.out_dir / "benchmark_summary.json", doc);
  out << doc.dump(2) << '\n';
}

void cmd_sweep_power(const RunRequest& req, const Scenario& s, std::ostream& out) {
  if (req.p_list.empty()) throw UsageError("--p-list is empty");
  RecoveryOptions rec;
  rec.budget_norm = req.budget_norm;
  const GridSpec grid = grid_of(req);
  std::vector<PointResult> points(req.p_list.size());
  parallel_for(static_cast<int>(points.size()), worker_count(), [&](int i) {
    const double dbm = req.p_list[static_cast<size_t>(i)];
    points[static_cast<size_t>(i)] =
        run_all_schemes(s.with_uniform_budget(dbm_to_watts(dbm)), grid, rec, dbm);
  });
  const auto rows = flatten(points);
  write_file(req.out_dir / "sweep_power.csv", [&](std::ostream& os) { write_sweep_csv(os, rows); });
  out << rows_to_json(rows).dump(2) << '\n';
}

void cmd_sweep_duration(const RunRequest& req, const Scenario& s, std::ostream& out) {
  if (req.t_list.empty()) throw UsageError("--t-list is empty");
  RecoveryOptions rec;
  rec.budget_norm = req.budget_norm;
  const GridSpec grid = grid_of(req);
  const double rate = s.slots() / s.duration();
  const double dbm = uniform_budget_dbm(s);
  std::vector<PointResult> points(req.t_list.size());
  parallel_for(static_cast<int>(points.size()), worker_count(), [&](int i) {
    const double t = req.t_list[static_cast<size_t>(i)];
    if (!(t > 0.0)) throw UsageError("durations must be positive");
    const int n = std::max(1, static_cast<int>(std::lround(rate * t)));
    points[static_cast<size_t>(i)] = run_all_schemes(s.with_duration(t, n), grid, rec, dbm);
  });
  const auto rows = flatten(points);
  write_file(req.out_dir / "sweep_duration.csv",
             [&](std::ostream& os) { write_sweep_csv(os, rows); });
  out << rows_to_json(rows).dump(2) << '\n';
}

json error_record(const std::string& kind, const std::string& message,
                  const std::string& field = {}) {
  json e = {{"kind", kind}, {"message", message}};
  if (!field.empty()) e["field"] = field;
  return json{{"error", e}};
}

void add_common(CLI::App* sub, RunRequest& req, std::string& positional, std::string& flag,
                std::string& norm) {
  sub->add_option("scenario_file", positional, "Scenario JSON");
  sub->add_option("--scenario", flag, "Scenario JSON");
  sub->add_option("--grid", req.grid, "Grid points per axis")->check(CLI::Range(2, 4001));
  sub->add_option("--out", req.out_dir, "Output directory");
  sub->add_option("--t-s", req.t_s, "Override horizon T [s]");
  sub->add_option("--p-ave-dbm", req.p_ave_dbm, "Override every power budget [dBm]");
  sub->add_option("--n-slots", req.n_slots, "Override slot count N")->check(CLI::PositiveNumber);
  sub->add_option("--budget-norm", norm, "horizon | active_slots")
      ->check(CLI::IsMember({"horizon", "active_slots"}));
}

}  // namespace

Scenario load_request_scenario(const RunRequest& req) {
  if (req.scenario.empty()) throw UsageError("no scenario file given");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(req.scenario, ec)) {
    throw IoError("scenario file not found: " + req.scenario.string());
  }
  Scenario s = load_scenario_file(req.scenario);
  if (req.t_s || req.n_slots) {
    s = s.with_duration(req.t_s.value_or(s.duration()), req.n_slots.value_or(s.slots()));
  }
  if (req.p_ave_dbm) s = s.with_uniform_budget(dbm_to_watts(*req.p_ave_dbm));
  return s;
}

void execute(const RunRequest& req, std::ostream& out) {
  using Handler = void (*)(const RunRequest&, const Scenario&, std::ostream&);
  static const std::vector<std::pair<std::string, Handler>> handlers = {
      {"relaxed", cmd_relaxed},         {"sca", cmd_sca},
      {"recover", cmd_recover},         {"benchmark", cmd_benchmark},
      {"sweep-power", cmd_sweep_power}, {"sweep-duration", cmd_sweep_duration}};
  const auto it = std::find_if(handlers.begin(), handlers.end(),
                               [&](const auto& h) { return h.first == req.command; });
  if (it == handlers.end()) throw UsageError("unknown command '" + req.command + "'");
  const Scenario s = load_request_scenario(req);
  std::error_code ec;
  std::filesystem::create_directories(req.out_dir, ec);
  if (ec) throw IoError("cannot create " + req.out_dir.string() + ": " + ec.message());
  it->second(req, s, out);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunRequest req;
  std::string positional, flag, norm;
  CLI::App app{"Outage-minimizing UAV data collection planner", "outage-planner"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"relaxed", "Relaxed (speed-free) optimum: hover plan, prices, cost map"},
      {"sca", "Relaxed optimum, SHF initialization and alternating SCA"},
      {"recover", "Full pipeline including on-off power recovery"},
      {"benchmark", "Comparison schemes"},
      {"sweep-power", "Outage of every scheme versus the power budget"},
      {"sweep-duration", "Outage of every scheme versus the horizon"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, req, positional, flag, norm);
    if (name == "benchmark") {
      sub->add_option("--scheme", req.scheme,
                      "fly_hover_fly | power_only | trajectory_only | all");
    } else if (name == "sweep-power") {
      sub->add_option("--p-list", req.p_list, "Budgets [dBm]")->delimiter(',');
    } else if (name == "sweep-duration") {
      sub->add_option("--t-list", req.t_list, "Horizons [s]; N scales with T")->delimiter(',');
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_record("usage", e.what()).dump() << '\n';
    return 2;
  }

  try {
    req.command = app.get_subcommands().front()->get_name();
    if (!positional.empty() && !flag.empty() && positional != flag) {
      throw UsageError("scenario given twice");
    }
    req.scenario = flag.empty() ? positional : flag;
    if (!norm.empty()) req.budget_norm = *parse_budget_norm(norm);
    execute(req, out);
  } catch (const UsageError& e) {
    err << error_record("usage", e.what()).dump() << '\n';
    return 2;
  } catch (const InvalidScenario& e) {
    err << error_record("invalid_scenario", e.what(), e.field()).dump() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << error_record("io", e.what()).dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << error_record("failure", e.what()).dump() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace outage::cli
