#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "outage/recovery.hpp"
#include "outage/scenario.hpp"

namespace outage::cli {

struct RunRequest {
  std::string command;
  std::filesystem::path scenario;
  int grid = 81;
  std::filesystem::path out_dir = "out";
  std::optional<double> t_s;
  std::optional<double> p_ave_dbm;
  std::optional<int> n_slots;
  BudgetNorm budget_norm = BudgetNorm::kHorizon;
  std::string scheme = "all";                            // benchmark
  std::vector<double> p_list = {26, 28, 30, 32, 34, 36};  // sweep-power, dBm
  std::vector<double> t_list = {10, 20, 40, 80};          // sweep-duration, s
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario file with the request's T / P^ave / N overrides applied.
Scenario load_request_scenario(const RunRequest& req);

/// Runs one command, writes its artifacts under req.out_dir and a JSON
/// summary to `out`. Throws on failure.
void execute(const RunRequest& req, std::ostream& out);

/// argv front end. Failures print one JSON error record to `err`:
///   {"error":{"kind":...,"message":...[,"field":...]}}
/// Exit codes: 0 ok, 2 bad usage or invalid input, 1 anything else.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace outage::cli
