#include "outage/scenario_io.hpp"

#include <fstream>
#include <sstream>

namespace outage {

namespace {

using nlohmann::json;

const json& field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw InvalidScenario(name, "missing required field");
  return *it;
}

double number(const json& doc, const char* name) {
  const json& v = field(doc, name);
  if (!v.is_number()) throw InvalidScenario(name, "expected a number");
  return v.get<double>();
}

int integer(const json& doc, const char* name) {
  const json& v = field(doc, name);
  if (!v.is_number_integer()) throw InvalidScenario(name, "expected an integer");
  return v.get<int>();
}

Vec2 point(const json& doc, const char* name) {
  const json& v = field(doc, name);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw InvalidScenario(name, "expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

Scenario load_scenario(const json& doc) {
  if (!doc.is_object()) throw InvalidScenario("<root>", "expected a JSON object");

  ScenarioSpec spec;
  const json& sensors = field(doc, "sensors");
  if (!sensors.is_array()) throw InvalidScenario("sensors", "expected an array");
  int id = 1;
  for (const json& entry : sensors) {
    const std::string where = "sensors[" + std::to_string(id - 1) + "]";
    if (!entry.is_object()) throw InvalidScenario(where, "expected an object");
    for (const char* key : {"x", "y", "p_ave_dbm"}) {
      auto it = entry.find(key);
      if (it == entry.end() || !it->is_number()) {
        throw InvalidScenario(where + "." + key, "missing or not a number");
      }
    }
    spec.sensors.push_back({id++,
                            {entry["x"].get<double>(), entry["y"].get<double>()},
                            dbm_to_watts(entry["p_ave_dbm"].get<double>())});
  }
  spec.altitude = number(doc, "h_m");
  spec.ref_gain = db_to_linear(number(doc, "beta0_db"));
  spec.path_loss_exp = number(doc, "alpha");
  spec.noise_power = dbm_to_watts(number(doc, "noise_dbm"));
  spec.snr_threshold = number(doc, "gamma_min");
  spec.v_max = number(doc, "vmax_mps");
  spec.duration = number(doc, "t_s");
  spec.slots = integer(doc, "n_slots");
  spec.start = point(doc, "q_i");
  spec.finish = point(doc, "q_f");
  return Scenario::create(std::move(spec));
}

Scenario load_scenario_text(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw InvalidScenario("<root>", "not valid JSON");
  return load_scenario(doc);
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidScenario("<file>", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str());
}

json scenario_to_json(const Scenario& s) {
  json sensors = json::array();
  for (const auto& site : s.sensors()) {
    sensors.push_back({{"x", site.position.x()},
                       {"y", site.position.y()},
                       {"p_ave_dbm", watts_to_dbm(site.avg_power_budget)}});
  }
  return {{"sensors", sensors},
          {"h_m", s.altitude()},
          {"beta0_db", linear_to_db(s.ref_gain())},
          {"alpha", s.path_loss_exp()},
          {"noise_dbm", watts_to_dbm(s.noise_power())},
          {"gamma_min", s.snr_threshold()},
          {"vmax_mps", s.v_max()},
          {"t_s", s.duration()},
          {"n_slots", s.slots()},
          {"q_i", {s.start().x(), s.start().y()}},
          {"q_f", {s.finish().x(), s.finish().y()}}};
}

}  // namespace outage
