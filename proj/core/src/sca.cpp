#include "outage/sca.hpp"

#include <algorithm>
#include <cmath>

#include "outage/channel.hpp"
#include "outage/csv.hpp"

namespace outage {

double received_amplitude(const Vec2& q, double power, const SensorSite& sensor,
                          const Scenario& s) {
  return std::sqrt(power * channel_gain(q, sensor, s));
}

double amplitude_lower_bound(const Vec2& q, const Vec2& q_ref, double power,
                             const SensorSite& sensor, const Scenario& s) {
  const double h2 = s.altitude() * s.altitude();
  const double quarter = s.path_loss_exp() / 4.0;
  const double d_ref = (q_ref - sensor.position).squaredNorm() + h2;
  const double d = (q - sensor.position).squaredNorm() + h2;
  const double scale = std::sqrt(power * s.ref_gain());
  const double at_ref = std::pow(d_ref, -quarter);
  return scale * (at_ref - quarter * at_ref / d_ref * (d - d_ref));
}

double square_sum_lower_bound(const Eigen::VectorXd& a, const Eigen::VectorXd& a_ref) {
  const double r = a_ref.sum();
  return r * r + 2.0 * r * (a.sum() - r);
}

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kInit: return "init";
    case StepKind::kTrajectory: return "trajectory";
    case StepKind::kPower: return "power";
  }
  return "unknown";
}

double ScaState::objective(const Scenario& s) const {
  if (received.size() == 0) return 0.0;
  return received.mean() / s.noise_power();
}

ScaState make_state(const Scenario& s, Trajectory tr, PowerSchedule ps) {
  const int n = s.slots();
  const int k_count = s.num_sensors();
  if (tr.slots() != n || ps.slots() != n || ps.num_sensors() != k_count) {
    throw DimensionMismatch("plan dimensions do not match the scenario");
  }
  ScaState st;
  st.amplitudes.resize(k_count, n);
  st.received.resize(n);
  const double cap = s.snr_threshold() * s.noise_power();
  for (int j = 0; j < n; ++j) {
    const Vec2& q = tr.slot_position(j);
    for (int k = 0; k < k_count; ++k) {
      st.amplitudes(k, j) =
          received_amplitude(q, ps.powers(k, j), s.sensors()[static_cast<size_t>(k)], s);
    }
    const double sum = st.amplitudes.col(j).sum();
    st.received[j] = std::min(cap, sum * sum);
  }
  st.trajectory = std::move(tr);
  st.powers = std::move(ps);
  return st;
}

namespace {

// Strictly-below start for an auxiliary bounded above by `limit`.
double shrink_below(double limit, double factor) {
  if (limit > 0.0) return factor * limit;
  return limit - (1.0 - factor) * std::abs(limit) - 1e-9;
}

bool strictly_negative(const std::vector<ConvexTerm>& terms, const Eigen::VectorXd& x) {
  TermEval e;
  for (const auto& t : terms) {
    Eigen::VectorXd local(static_cast<Eigen::Index>(t.vars.size()));
    for (size_t i = 0; i < t.vars.size(); ++i) local[static_cast<Eigen::Index>(i)] = x[t.vars[i]];
    if (!t.fn(local, e, false) || !(e.value < 0.0)) return false;
  }
  return true;
}

ScaState finish_step(const ScaState& before, ScaState after, const Scenario& s, StepKind kind,
                     bool solved) {
  const double old_obj = before.objective(s);
  ScaState out;
  bool accepted = false;
  if (solved) {
    accepted = after.objective(s) >= old_obj;
  }
  if (accepted) {
    out = std::move(after);
    out.trace = before.trace;
  } else {
    out = before;
  }
  out.iteration = before.iteration + 1;
  out.trace.push_back({out.iteration, out.objective(s), kind, accepted});
  return out;
}

}  // namespace

ScaState trajectory_step(const ScaState& state, const Scenario& s, const ScaOptions& options) {
  const int n = s.slots();
  const int k_count = s.num_sensors();
  if (!options.optimize_trajectory || n < 2) {
    return finish_step(state, state, s, StepKind::kTrajectory, false);
  }
  // Normalized units: amplitudes relative to sigma sqrt(gamma), u = A / (gamma sigma^2).
  const double amp_unit = s.noise_amplitude() * std::sqrt(s.snr_threshold());
  const double h2 = s.altitude() * s.altitude();
  const double quarter = s.path_loss_exp() / 4.0;
  const int free = n - 1;
  const int u0 = 2 * free;
  const auto qvar = [](int i) { return 2 * (i - 1); };  // waypoint i in 1..N-1

  SmoothConvexProgram p;
  p.dimension = u0 + n;
  p.objective.push_back(
      affine_term([&] {
        std::vector<int> v(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) v[static_cast<size_t>(j)] = u0 + j;
        return v;
      }(), Eigen::VectorXd::Constant(n, -1.0 / n), 0.0));

  const Trajectory& tr = state.trajectory;
  for (int j = 0; j < n; ++j) {
    const int wp = j + 1;
    const Vec2& q_ref = tr.waypoints[static_cast<size_t>(wp)];
    const double b_ref = state.amplitudes.col(j).sum() / amp_unit;
    // sum_k a_low_k(q) = c0 - sum_k w_k ||q - S_k||^2.
    double c0 = 0.0;
    double w_sum = 0.0;
    Vec2 w_pos = Vec2::Zero();
    double w_sq = 0.0;
    for (int k = 0; k < k_count; ++k) {
      const SensorSite& site = s.sensors()[static_cast<size_t>(k)];
      const double c = std::sqrt(state.powers.powers(k, j) * s.ref_gain()) / amp_unit;
      if (c == 0.0) continue;
      const double d_ref = (q_ref - site.position).squaredNorm() + h2;
      const double at_ref = std::pow(d_ref, -quarter);
      const double w = c * quarter * at_ref / d_ref;
      c0 += c * at_ref + w * (d_ref - h2);
      w_sum += w;
      w_pos += w * site.position;
      w_sq += w * site.position.squaredNorm();
    }
    // u - 2 B sum_k a_low_k(q) + B^2 <= 0.
    const double two_b = 2.0 * b_ref;
    if (wp < n) {
      Eigen::MatrixXd qm = Eigen::MatrixXd::Zero(3, 3);
      qm(0, 0) = qm(1, 1) = two_b * w_sum;
      Eigen::VectorXd lin(3);
      lin << -2.0 * two_b * w_pos.x(), -2.0 * two_b * w_pos.y(), 1.0;
      p.constraints.push_back(quadratic_term({qvar(wp), qvar(wp) + 1, u0 + j}, qm, lin,
                                             two_b * w_sq - two_b * c0 + b_ref * b_ref));
    } else {
      const double bound = b_ref * b_ref;  // q_N is fixed: the bound is exact
      p.constraints.push_back(affine_term({u0 + j}, Eigen::VectorXd::Ones(1), -bound));
    }
    p.constraints.push_back(affine_term({u0 + j}, Eigen::VectorXd::Ones(1), -1.0));
  }

  const double step2 = s.max_step() * s.max_step();
  const Vec2& qi = s.start();
  const Vec2& qf = s.finish();
  {
    Eigen::MatrixXd qm = Eigen::MatrixXd::Identity(2, 2);
    p.constraints.push_back(
        quadratic_term({qvar(1), qvar(1) + 1}, qm, -2.0 * qi, qi.squaredNorm() - step2));
    p.constraints.push_back(quadratic_term({qvar(free), qvar(free) + 1}, qm, -2.0 * qf,
                                           qf.squaredNorm() - step2));
  }
  for (int i = 2; i <= free; ++i) {
    Eigen::MatrixXd qm(4, 4);
    qm << 1, 0, -1, 0,  //
        0, 1, 0, -1,    //
        -1, 0, 1, 0,    //
        0, -1, 0, 1;
    p.constraints.push_back(quadratic_term({qvar(i - 1), qvar(i - 1) + 1, qvar(i), qvar(i) + 1},
                                           qm, Eigen::VectorXd::Zero(4), -step2));
  }

  // Interior start.
  const Trajectory direct = direct_trajectory(s);
  Eigen::VectorXd x(p.dimension);
  const double th = options.start_blend;
  for (int i = 1; i <= free; ++i) {
    const Vec2 q = (1.0 - th) * tr.waypoints[static_cast<size_t>(i)] +
                   th * direct.waypoints[static_cast<size_t>(i)];
    x[qvar(i)] = q.x();
    x[qvar(i) + 1] = q.y();
  }
  for (int j = 0; j < n; ++j) x[u0 + j] = 0.0;
  {
    // Largest u each slot bound admits at the blended start.
    TermEval e;
    for (int j = 0; j < n; ++j) {
      const auto& t = p.constraints[static_cast<size_t>(2 * j)];
      Eigen::VectorXd local(static_cast<Eigen::Index>(t.vars.size()));
      for (size_t a = 0; a < t.vars.size(); ++a) local[static_cast<Eigen::Index>(a)] = x[t.vars[a]];
      t.fn(local, e, false);  // value at u = 0
      x[u0 + j] = shrink_below(std::min(1.0, -e.value), options.aux_shrink);
    }
  }
  p.start = x;
  if (!strictly_negative(p.constraints, x)) {
    return finish_step(state, state, s, StepKind::kTrajectory, false);
  }

  const BarrierOutcome out = solve_barrier(p, options.barrier);
  if (!out.optimal()) return finish_step(state, state, s, StepKind::kTrajectory, false);

  Trajectory next = tr;
  for (int i = 1; i <= free; ++i) {
    next.waypoints[static_cast<size_t>(i)] = Vec2(out.solution[qvar(i)], out.solution[qvar(i) + 1]);
  }
  ScaState after = make_state(s, std::move(next), state.powers);
  return finish_step(state, std::move(after), s, StepKind::kTrajectory, true);
}

ScaState power_step(const ScaState& state, const Scenario& s, const ScaOptions& options) {
  const int n = s.slots();
  const int k_count = s.num_sensors();
  if (!options.optimize_powers) return finish_step(state, state, s, StepKind::kPower, false);

  const double amp_unit = s.noise_amplitude() * std::sqrt(s.snr_threshold());
  const Eigen::VectorXd budgets = s.power_budgets();
  std::vector<int> active;
  for (int k = 0; k < k_count; ++k) {
    if (budgets[k] > 0.0) active.push_back(k);
  }
  const int ka = static_cast<int>(active.size());
  if (ka == 0) return finish_step(state, state, s, StepKind::kPower, false);

  const int u0 = ka * n;
  const auto rvar = [n](int a, int j) { return a * n + j; };

  SmoothConvexProgram p;
  p.dimension = u0 + n;
  {
    std::vector<int> v(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) v[static_cast<size_t>(j)] = u0 + j;
    p.objective.push_back(affine_term(std::move(v), Eigen::VectorXd::Constant(n, -1.0 / n), 0.0));
  }

  // h(k, j) = sqrt(g) / amp_unit so that the normalized amplitude is rho h.
  Eigen::MatrixXd h(ka, n);
  Eigen::MatrixXd rho(ka, n);
  for (int j = 0; j < n; ++j) {
    const Vec2& q = state.trajectory.slot_position(j);
    for (int a = 0; a < ka; ++a) {
      const int k = active[static_cast<size_t>(a)];
      h(a, j) = std::sqrt(channel_gain(q, s.sensors()[static_cast<size_t>(k)], s)) / amp_unit;
      rho(a, j) = std::sqrt(std::max(0.0, state.powers.powers(k, j)));
    }
  }

  for (int j = 0; j < n; ++j) {
    const double b_ref = h.col(j).dot(rho.col(j));
    std::vector<int> vars;
    Eigen::VectorXd coeffs(ka + 1);
    for (int a = 0; a < ka; ++a) {
      vars.push_back(rvar(a, j));
      coeffs[a] = -2.0 * b_ref * h(a, j);
    }
    vars.push_back(u0 + j);
    coeffs[ka] = 1.0;
    p.constraints.push_back(affine_term(std::move(vars), coeffs, b_ref * b_ref));
    p.constraints.push_back(affine_term({u0 + j}, Eigen::VectorXd::Ones(1), -1.0));
  }
  for (int a = 0; a < ka; ++a) {
    for (int j = 0; j < n; ++j) {
      p.constraints.push_back(affine_term({rvar(a, j)}, Eigen::VectorXd::Constant(1, -1.0), 0.0));
    }
    std::vector<int> vars(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) vars[static_cast<size_t>(j)] = rvar(a, j);
    p.constraints.push_back(
        squared_norm_term(std::move(vars), 1.0, -n * budgets[active[static_cast<size_t>(a)]]));
  }

  // Interior start: pull every rho towards a small uniform level, which
  // keeps the budget strict by the triangle inequality.
  Eigen::VectorXd x(p.dimension);
  const double keep = options.aux_shrink;
  const double lift = 0.5 * (1.0 - keep);
  for (int a = 0; a < ka; ++a) {
    const double level = std::sqrt(budgets[active[static_cast<size_t>(a)]]);
    for (int j = 0; j < n; ++j) x[rvar(a, j)] = keep * rho(a, j) + lift * level;
  }
  for (int j = 0; j < n; ++j) {
    const double b_ref = h.col(j).dot(rho.col(j));
    double b = 0.0;
    for (int a = 0; a < ka; ++a) b += h(a, j) * x[rvar(a, j)];
    const double bound = 2.0 * b_ref * b - b_ref * b_ref;
    x[u0 + j] = shrink_below(std::min(1.0, bound), keep);
  }
  p.start = x;
  if (!strictly_negative(p.constraints, x)) {
    return finish_step(state, state, s, StepKind::kPower, false);
  }

  const BarrierOutcome out = solve_barrier(p, options.barrier);
  if (!out.optimal()) return finish_step(state, state, s, StepKind::kPower, false);

  PowerSchedule next = PowerSchedule::zeros(k_count, n);
  for (int a = 0; a < ka; ++a) {
    const int k = active[static_cast<size_t>(a)];
    for (int j = 0; j < n; ++j) {
      const double r = std::max(0.0, out.solution[rvar(a, j)]);
      next.powers(k, j) = r * r;
    }
  }
  ScaState after = make_state(s, state.trajectory, std::move(next));
  return finish_step(state, std::move(after), s, StepKind::kPower, true);
}

ScaResult plan_sca(const Scenario& s, const Trajectory& init, const ScaOptions& options) {
  ScaResult res;
  res.state = make_state(s, init, PowerSchedule::uniform(s));
  res.state.trace.push_back({0, res.state.objective(s), StepKind::kInit, true});
  for (int round = 0; round < options.max_rounds; ++round) {
    const double before = res.state.objective(s);
    if (options.optimize_trajectory) res.state = trajectory_step(res.state, s, options);
    if (options.optimize_powers) res.state = power_step(res.state, s, options);
    res.rounds = round + 1;
    const double gain = res.state.objective(s) - before;
    if (gain <= options.relative_tolerance * std::max(std::abs(before), 1e-300)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
  CsvWriter csv(out);
  csv.header({"iter", "objective", "step_kind", "accepted"});
  for (const auto& e : trace) {
    csv.field(e.iter).field(e.objective).field(to_string(e.kind)).field(e.accepted ? 1 : 0);
    csv.end_row();
  }
}

}  // namespace outage
