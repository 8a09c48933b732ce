#include "finbath/presets.hpp"

#include <charconv>

#include <json.hpp>

#include "finbath/errors.hpp"

namespace finbath::presets {

namespace {

using nlohmann::json;

// Built as documents so that presets hash exactly like the equivalent file.
json base(const std::string& name, const char* model) {
  return json{{"name", name},
              {"model", model},
              {"t_max", 10.0},
              {"n_points", 1001},
              {"outputs", json::array({"thermo"})}};
}

// Shortest round-trip form, so names read "0.1" rather than 17 digits.
std::string label(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json pure_amplitudes() {
  return json::array({json::array({0.8660254037844386, 0.0}), json::array({0.5, 0.0})});
}

scenario::ScenarioConfig central_spin(const std::string& name, double p,
                                      const scenario::Overrides& o) {
  json doc = base(name, "central-spin");
  doc["params"] = {{"omega0", 1.5}, {"omega", 1.0}, {"n_bath", 50}, {"epsilon", 0.5},
                   {"beta", 0.5}};
  doc["initial_state"] = {{"amplitudes", pure_amplitudes()}, {"mixing_p", p}};
  return scenario::parse_config(doc.dump(), o);
}

}  // namespace

std::vector<std::string> names() { return {"fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "hcan"}; }

std::vector<double> fig1e_gammas() { return {0.5, 1.0, 2.0, 5.0}; }

std::vector<scenario::ScenarioConfig> preset(const std::string& name,
                                             const scenario::Overrides& o) {
  if (name == "fig1a") return {central_spin(name, 0.0, o)};
  if (name == "fig1b") return {central_spin(name, 0.05, o)};
  if (name == "fig1c") return {central_spin(name, 0.5, o)};
  if (name == "fig1d") return {central_spin(name, 1.0, o)};
  if (name == "fig1e") {
    std::vector<scenario::ScenarioConfig> out;
    for (double g : fig1e_gammas()) {
      json doc = base(name + "_gamma_" + label(g), "rtn");
      doc["params"] = {{"omega0", 1.5}, {"n_bath", 50}, {"epsilon", 0.5}, {"gamma", g}};
      doc["initial_state"] = {{"amplitudes", pure_amplitudes()}, {"mixing_p", 1.0}};
      out.push_back(scenario::parse_config(doc.dump(), o));
    }
    return out;
  }
  if (name == "hcan") {
    std::vector<scenario::ScenarioConfig> out;
    for (double eps : {0.5, 0.1, 0.05}) {
      json doc = base("hcan_epsilon_" + label(eps), "central-spin");
      doc["t_max"] = 25.0;
      doc["n_points"] = 2501;
      doc["outputs"] = json::array({"canonical-hamiltonian"});
      doc["params"] = {{"omega0", 1.5}, {"omega", 1.0}, {"n_bath", 50}, {"epsilon", eps},
                       {"beta", 0.5}};
      out.push_back(scenario::parse_config(doc.dump(), o));
    }
    return out;
  }
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

}  // namespace finbath::presets
