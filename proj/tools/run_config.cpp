#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace backflow::cli {
namespace {

constexpr double kPi = std::numbers::pi;

using nlohmann::json;

const std::vector<std::pair<Scenario, std::string>>& scenario_names() {
  static const std::vector<std::pair<Scenario, std::string>> names = {
      {Scenario::current_map, "current-map"},
      {Scenario::left_prob, "left-prob"},
      {Scenario::two_particle, "two-particle"},
      {Scenario::fidelity_scan, "fidelity-scan"},
      {Scenario::fidelity_backflow, "fidelity-backflow"},
      {Scenario::validate, "validate"},
  };
  return names;
}

void require_finite(double v, const std::string& field) {
  if (!std::isfinite(v)) throw ConfigError("config: field '" + field + "' must be finite");
}

void require_list(const std::vector<double>& v, const std::string& field) {
  if (v.empty()) throw ConfigError("config: field '" + field + "' must be a nonempty list");
  for (double x : v) require_finite(x, field);
}

void require_axis(const AxisSpec& a, const std::string& field) {
  require_finite(a.start, field + ".start");
  require_finite(a.stop, field + ".stop");
  if (a.count == 0) throw ConfigError("config: field '" + field + ".count' must be positive");
  if (a.count > 1 && !(a.stop > a.start)) {
    throw ConfigError("config: field '" + field + "' needs stop > start when count > 1");
  }
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("config: unknown key '" + key + "' in " + (where.empty() ? "top level" : "'" + where + "'"));
    }
  }
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config: field '" + where + "." + key + "' has the wrong type (" + e.what() + ")");
  }
}

void read_list(const json& obj, const char* key, const std::string& where, std::vector<double>& target) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  // a bare number is accepted as a one-element list
  if (v.is_number()) {
    target = {v.get<double>()};
    return;
  }
  read(obj, key, where, target);
}

void read_axis(const json& obj, const char* key, const std::string& where, AxisSpec& axis) {
  if (!obj.contains(key)) return;
  const auto& a = obj.at(key);
  const std::string name = where + "." + key;
  check_keys(a, name, {"start", "stop", "count"});
  read(a, "start", name, axis.start);
  read(a, "stop", name, axis.stop);
  read(a, "count", name, axis.count);
}

json axis_json(const AxisSpec& a) {
  return nlohmann::ordered_json{{"start", a.start}, {"stop", a.stop}, {"count", a.count}};
}

}  // namespace

std::vector<double> AxisSpec::values() const {
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = start;
    return v;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) v[i] = i + 1 == count ? stop : start + step * static_cast<double>(i);
  return v;
}

void RunConfig::validate() const {
  require_list(gamma, "params.gamma");
  for (double v : gamma) {
    if (v < 0.0) throw ConfigError("config: params.gamma entries must be >= 0");
  }
  require_finite(g, "params.g");
  require_finite(mass, "params.mass");
  require_finite(hbar, "params.hbar");
  if (!(mass > 0.0) || !(hbar > 0.0)) throw ConfigError("config: params.mass and params.hbar must be positive");
  for (auto [v, f] : {std::pair{sigma_p, "packets.sigma_p"}, {x0, "packets.x0"}, {p0a, "packets.p0a"},
                      {p0b, "packets.p0b"}, {alpha, "state.alpha"}, {theta, "state.theta"},
                      {theta_phi, "state.theta_phi"}, {t_max, "detector.t_max"}, {tol, "detector.tol"}}) {
    require_finite(v, f);
  }
  if (!(sigma_p > 0.0)) throw ConfigError("config: packets.sigma_p must be positive");
  require_list(eta, "packets.eta");
  require_list(alpha_phi, "state.alpha_phi");
  require_axis(theta_axis, "grids.theta");
  require_axis(time_axis, "grids.time");
  require_axis(alpha_phi_axis, "grids.alpha_phi");
  if (time_axis.start < 0.0) throw ConfigError("config: grids.time must start at t >= 0");
  if (!(t_max > 0.0) || !(tol > 0.0)) throw ConfigError("config: detector.t_max and detector.tol must be positive");
  if (g != 0.0) throw ConfigError("config: params.g != 0 is not supported by the position-space scenarios");
  if (scenario == Scenario::current_map && eta.size() != 1) {
    throw ConfigError("config: current-map takes a single packets.eta value");
  }
  if ((scenario == Scenario::two_particle || scenario == Scenario::fidelity_scan ||
       scenario == Scenario::fidelity_backflow) && eta.size() != 1) {
    throw ConfigError("config: two-particle scenarios take a single packets.eta value");
  }
  if (scenario == Scenario::fidelity_scan && alpha_phi_axis.start < 0.0) {
    throw ConfigError("config: grids.alpha_phi must start at >= 0");
  }
  for (double a : alpha_phi) {
    if (a < 0.0) throw ConfigError("config: state.alpha_phi entries must be >= 0");
  }
}

std::string scenario_name(Scenario s) {
  for (const auto& [k, v] : scenario_names()) {
    if (k == s) return v;
  }
  return "unknown";
}

std::optional<Scenario> parse_scenario(const std::string& name) {
  for (const auto& [k, v] : scenario_names()) {
    if (v == name) return k;
  }
  return std::nullopt;
}

std::string format_name(Format f) { return f == Format::csv ? "csv" : "ndjson"; }

RunConfig scenario_defaults(Scenario s) {
  RunConfig c;
  c.scenario = s;
  switch (s) {
    case Scenario::current_map:
      c.theta_axis = {0.0, 2.0 * kPi, 512};
      c.time_axis = {0.0, 10.0, 512};
      break;
    case Scenario::left_prob:
      c.theta = kPi;
      break;
    case Scenario::two_particle:
      c.theta = kPi;
      c.theta_phi = 1.01 * kPi;
      break;
    case Scenario::fidelity_scan:
    case Scenario::fidelity_backflow:
      c.theta = kPi;
      c.theta_phi = kPi;
      break;
    case Scenario::validate:
      break;
  }
  return c;
}

std::vector<std::pair<std::string, RunConfig>> builtin_presets() {
  std::vector<std::pair<std::string, RunConfig>> presets;

  RunConfig fig1 = scenario_defaults(Scenario::current_map);
  fig1.gamma = {0.0, 0.1, 0.2, 0.3};
  presets.emplace_back("fig1", fig1);

  RunConfig fig2 = scenario_defaults(Scenario::left_prob);
  fig2.gamma = {0.0, 0.3};
  fig2.eta = {0.0, 0.5, 1.0, 2.0};
  presets.emplace_back("fig2", fig2);

  RunConfig fig3 = scenario_defaults(Scenario::two_particle);
  fig3.gamma = {0.0, 0.1, 0.2};
  presets.emplace_back("fig3", fig3);

  RunConfig fig4 = scenario_defaults(Scenario::fidelity_scan);
  presets.emplace_back("fig4", fig4);

  RunConfig fig5 = scenario_defaults(Scenario::fidelity_backflow);
  fig5.alpha_phi = {1.0, 1.9, 3.5};
  presets.emplace_back("fig5", fig5);
  return presets;
}

std::optional<RunConfig> find_preset(const std::string& name) {
  for (auto& [n, c] : builtin_presets()) {
    if (n == name) return c;
  }
  return std::nullopt;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json doc;
  doc["scenario"] = scenario_name(c.scenario);
  doc["params"] = {{"gamma", c.gamma}, {"g", c.g}, {"mass", c.mass}, {"hbar", c.hbar}};
  doc["packets"] = {{"sigma_p", c.sigma_p}, {"x0", c.x0}, {"p0a", c.p0a}, {"p0b", c.p0b}, {"eta", c.eta}};
  doc["state"] = {{"alpha", c.alpha}, {"theta", c.theta}, {"theta_phi", c.theta_phi}, {"alpha_phi", c.alpha_phi}};
  doc["grids"] = {{"theta", axis_json(c.theta_axis)},
                  {"time", axis_json(c.time_axis)},
                  {"alpha_phi", axis_json(c.alpha_phi_axis)}};
  doc["detector"] = {{"t_max", c.t_max}, {"tol", c.tol}};
  doc["output"] = {{"path", c.out}, {"format", format_name(c.format)}, {"raw", c.raw}};
  return doc;
}

void apply_json(RunConfig& c, const json& doc) {
  check_keys(doc, "", {"scenario", "params", "packets", "state", "grids", "detector", "output"});
  if (doc.contains("scenario")) {
    std::string name;
    read(doc, "scenario", "", name);
    const auto s = parse_scenario(name);
    if (!s) throw ConfigError("config: unknown scenario '" + name + "'");
    if (*s != c.scenario) {
      throw ConfigError("config: scenario '" + name + "' conflicts with the requested '" +
                        scenario_name(c.scenario) + "'");
    }
  }
  if (doc.contains("params")) {
    const auto& p = doc["params"];
    check_keys(p, "params", {"gamma", "g", "mass", "hbar"});
    read_list(p, "gamma", "params", c.gamma);
    read(p, "g", "params", c.g);
    read(p, "mass", "params", c.mass);
    read(p, "hbar", "params", c.hbar);
  }
  if (doc.contains("packets")) {
    const auto& p = doc["packets"];
    check_keys(p, "packets", {"sigma_p", "x0", "p0a", "p0b", "eta"});
    read(p, "sigma_p", "packets", c.sigma_p);
    read(p, "x0", "packets", c.x0);
    read(p, "p0a", "packets", c.p0a);
    read(p, "p0b", "packets", c.p0b);
    read_list(p, "eta", "packets", c.eta);
  }
  if (doc.contains("state")) {
    const auto& s = doc["state"];
    check_keys(s, "state", {"alpha", "theta", "theta_phi", "alpha_phi"});
    read(s, "alpha", "state", c.alpha);
    read(s, "theta", "state", c.theta);
    read(s, "theta_phi", "state", c.theta_phi);
    read_list(s, "alpha_phi", "state", c.alpha_phi);
  }
  if (doc.contains("grids")) {
    const auto& gr = doc["grids"];
    check_keys(gr, "grids", {"theta", "time", "alpha_phi"});
    read_axis(gr, "theta", "grids", c.theta_axis);
    read_axis(gr, "time", "grids", c.time_axis);
    read_axis(gr, "alpha_phi", "grids", c.alpha_phi_axis);
  }
  if (doc.contains("detector")) {
    const auto& d = doc["detector"];
    check_keys(d, "detector", {"t_max", "tol"});
    read(d, "t_max", "detector", c.t_max);
    read(d, "tol", "detector", c.tol);
  }
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    check_keys(o, "output", {"path", "format", "raw"});
    read(o, "path", "output", c.out);
    if (o.contains("format")) {
      std::string f;
      read(o, "format", "output", f);
      if (f == "csv") {
        c.format = Format::csv;
      } else if (f == "ndjson") {
        c.format = Format::ndjson;
      } else {
        throw ConfigError("config: output.format must be 'csv' or 'ndjson', got '" + f + "'");
      }
    }
    read(o, "raw", "output", c.raw);
  }
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    // nlohmann reports "parse error at line L, column C: ..."
    throw ConfigError(path + ": " + e.what());
  }
}

RunConfig from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("scenario") || !doc["scenario"].is_string()) {
    throw ConfigError("config: a string 'scenario' field is required");
  }
  const auto s = parse_scenario(doc["scenario"].get<std::string>());
  if (!s) throw ConfigError("config: unknown scenario '" + doc["scenario"].get<std::string>() + "'");
  RunConfig c = scenario_defaults(*s);
  apply_json(c, doc);
  return c;
}

}  // namespace backflow::cli
