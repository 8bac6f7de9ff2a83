#pragma once

// On-off power recovery: serve the N' best slots (by SNR of the input plan)
// and leave the rest silent, with N' the largest count for which a power
// schedule meeting the threshold on every served slot exists.

#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "outage/bisection.hpp"
#include "outage/scenario.hpp"

namespace outage {

/// How the average-power budget is normalized in the feasibility program.
///   kHorizon:     sum over active slots of P_k <= N  P_k^ave  (the plan's own constraint)
///   kActiveSlots: sum over active slots of P_k <= N' P_k^ave
enum class BudgetNorm { kHorizon, kActiveSlots };

const char* to_string(BudgetNorm norm);
std::optional<BudgetNorm> parse_budget_norm(std::string_view text);

/// Slots ordered by descending SNR, ties by ascending index (0-based).
struct SlotRanking {
  std::vector<int> order;
  std::vector<double> snr;  // indexed by slot, not by rank
};

SlotRanking rank_slots(const Trajectory& tr, const PowerSchedule& ps, const Scenario& s);

struct RecoveryOptions {
  BudgetNorm budget_norm = BudgetNorm::kHorizon;
  // The phase-1 program targets gamma (1 + margin) so that rounding cannot
  // push a served slot back under the threshold.
  double threshold_margin = 4e-9;
  double feasibility_tolerance = 1e-9;  // on the phase-1 slack t
  // Known upper bound on the servable count; the search skips counts above it.
  std::optional<int> max_served;
  // Also rank by the SNR under uniform powers P_k^ave on the same trajectory
  // and keep whichever ranking serves more slots (the plan's own ranking on
  // ties). A plan whose best slots are unservable on their own otherwise
  // collapses to zero served slots.
  bool uniform_ranking = true;
};

struct SubsetFeasibility {
  bool feasible = false;
  double slack = 0.0;      // phase-1 optimum (or the value at early exit)
  PowerSchedule powers;    // zero outside the served slots; meaningful when feasible
};

/// Can the first `n_prime` ranked slots all meet the threshold? Solves the
/// phase-1 program: min t s.t. sum_k rho_k[n] sqrt(g_k[n]) >= sqrt(gamma) sigma (1 - t)
/// on the served slots, rho >= 0 and the budget, with P = rho^2.
SubsetFeasibility feasibility_for_subset(int n_prime, const SlotRanking& ranking,
                                         const Trajectory& tr, const Scenario& s,
                                         const RecoveryOptions& options = {});

struct RecoveryResult {
  PowerSchedule powers;
  double outage = 1.0;
  int served_slots = 0;
  SlotRanking ranking;
  BisectionResult search;
};

/// Largest N' not excluded by Cauchy-Schwarz for the first N' ranked slots:
/// serving them needs N' sigma sqrt(gamma) <= sum_k sqrt(E_k sum_n g_k[n]),
/// E_k the energy budget. Every feasible count is at most this bound.
int servable_upper_bound(const SlotRanking& ranking, const Trajectory& tr, const Scenario& s,
                         BudgetNorm norm = BudgetNorm::kHorizon);

/// Bisection over N' with feasibility_for_subset as the probe, for the
/// ranking of `ps` (and the uniform-power ranking, see RecoveryOptions).
RecoveryResult recover_powers(const Trajectory& tr, const PowerSchedule& ps, const Scenario& s,
                              const RecoveryOptions& options = {});

/// `slot,x,y,snr,outage_flag,p_1_dbm,...,p_K_dbm` (1-based slots; empty
/// power cells for silent sensors).
void write_schedule_csv(std::ostream& out, const Trajectory& tr, const PowerSchedule& ps,
                        const Scenario& s);

}  // namespace outage
