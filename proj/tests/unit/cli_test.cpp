#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "outage-planner");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = outage::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("outage_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

const std::string kPaper = std::string(OUTAGE_SCENARIO_DIR) + "/paper.json";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("relaxed writes the hover plan") {
  const fs::path dir = scratch("relaxed");
  const Run r = invoke({"relaxed", kPaper, "--out", dir.string()});
  REQUIRE(r.code == 0);
  const json plan = json::parse(r.out);
  CHECK(plan["candidates"].size() == 3);
  CHECK(json::parse(slurp(dir / "hover_plan.json")) == plan);
  CHECK(fs::exists(dir / "relaxed.json"));
  CHECK(slurp(dir / "cost_map.csv").rfind("x,y,transmit_cost\n", 0) == 0);
}

TEST_CASE("recover and sca at desk scale") {
  const fs::path dir = scratch("recover");
  const Run r = invoke({"recover", "--scenario", kPaper, "--n-slots", "16", "--grid", "41",
                        "--out", dir.string()});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["feasible"] == true);
  CHECK(doc["slots"] == 16);
  CHECK(slurp(dir / "schedule.csv").rfind("slot,x,y,snr,outage_flag,p_1_dbm,", 0) == 0);
  CHECK(fs::exists(dir / "sca_trace.csv"));

  const Run s = invoke({"sca", kPaper, "--n-slots", "16", "--grid", "41", "--out", dir.string()});
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.out)["feasible"] == true);
  CHECK(fs::exists(dir / "sca_schedule.csv"));
}

TEST_CASE("benchmark writes one schedule per scheme") {
  const fs::path dir = scratch("benchmark");
  const Run r = invoke({"benchmark", kPaper, "--n-slots", "16", "--grid", "21", "--scheme",
                        "power_only", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).contains("power_only"));
  CHECK(fs::exists(dir / "schedule_power_only.csv"));
  CHECK(invoke({"benchmark", kPaper, "--scheme", "nope", "--out", dir.string()}).code == 2);
}

TEST_CASE("sweep-power is sorted and byte-identical across runs") {
  const fs::path a = scratch("sweep_a");
  const fs::path b = scratch("sweep_b");
  const std::vector<std::string> common = {"sweep-power", kPaper, "--n-slots", "16",
                                           "--grid", "21", "--p-list", "30,26"};
  auto args = common;
  args.insert(args.end(), {"--out", a.string()});
  REQUIRE(invoke(args).code == 0);
  args = common;
  args.insert(args.end(), {"--out", b.string()});
  REQUIRE(invoke(args).code == 0);
  const std::string csv = slurp(a / "sweep_power.csv");
  CHECK(csv == slurp(b / "sweep_power.csv"));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "scheme,p_ave_dbm,t_s,outage");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0].rfind("fly_hover_fly,26,20,", 0) == 0);
  CHECK(rows[8] == "trajectory_only,26,20,1");
  CHECK(rows[9] == "trajectory_only,30,20,1");
}

TEST_CASE("sweep-duration scales the slot count") {
  const fs::path dir = scratch("sweep_t");
  const Run r = invoke({"sweep-duration", kPaper, "--n-slots", "16", "--grid", "21", "--t-list",
                        "10,20", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const json rows = json::parse(r.out);
  CHECK(rows.size() == 10);
  bool bound_seen = false;
  for (const auto& row : rows) bound_seen |= row["scheme"] == "relaxed_bound";
  CHECK(bound_seen);
}

TEST_CASE("failures produce an error record and a nonzero exit") {
  const fs::path dir = scratch("errors");
  fs::create_directories(dir);
  json doc = outage::scenario_to_json(fixtures::paper_scenario());
  doc["sensors"] = json::array();
  std::ofstream(dir / "empty.json") << doc.dump();

  const Run empty = invoke({"relaxed", (dir / "empty.json").string(), "--out", dir.string()});
  CHECK(empty.code == 2);
  const json e = json::parse(empty.err);
  CHECK(e["error"]["kind"] == "invalid_scenario");
  CHECK(e["error"]["field"] == "sensors");

  const Run missing = invoke({"relaxed", (dir / "nope.json").string()});
  CHECK(missing.code == 1);
  CHECK(json::parse(missing.err)["error"]["kind"] == "io");

  CHECK(invoke({}).code == 2);
  CHECK(invoke({"explode", kPaper}).code == 2);
  CHECK(invoke({"relaxed", kPaper, "--grid", "1"}).code == 2);
  CHECK(invoke({"relaxed", kPaper, "--budget-norm", "weird"}).code == 2);
  CHECK(invoke({"relaxed"}).code == 2);
  CHECK(invoke({"relaxed", "--help"}).code == 0);
}

}
