#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace backflow::cli {

enum class Scenario { current_map, left_prob, two_particle, fidelity_scan, fidelity_backflow, validate };
enum class Format { csv, ndjson };

/// Inclusive uniform axis: count points from start to stop.
struct AxisSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;

  std::vector<double> values() const;
  bool operator==(const AxisSpec&) const = default;
};

struct RunConfig {
  Scenario scenario = Scenario::left_prob;

  // params
  std::vector<double> gamma{0.0};
  double g = 0.0;
  double mass = 1.0;
  double hbar = 1.0;

  // packets
  double sigma_p = 0.05;
  double x0 = 0.0;
  double p0a = 1.4;
  double p0b = 0.3;
  std::vector<double> eta{0.0};

  // state; alpha and theta describe chi in the two-particle scenarios
  double alpha = 1.9;
  double theta = 0.0;
  double theta_phi = 0.0;
  std::vector<double> alpha_phi{1.9};

  // grids
  AxisSpec theta_axis{0.0, 0.0, 1};
  AxisSpec time_axis{0.0, 10.0, 1001};
  AxisSpec alpha_phi_axis{0.0, 5.0, 501};

  // detector
  double t_max = 10.0;
  double tol = 1e-9;

  // output
  std::string out;  ///< empty means stdout
  Format format = Format::csv;
  bool raw = false;

  /// Throws ConfigError when a block is incomplete or a value is out of range.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string scenario_name(Scenario s);
std::optional<Scenario> parse_scenario(const std::string& name);
std::string format_name(Format f);

/// Default configuration for a scenario (atomic units, paper packet parameters).
RunConfig scenario_defaults(Scenario s);

/// Named presets fig1..fig5 in a fixed order.
std::vector<std::pair<std::string, RunConfig>> builtin_presets();
std::optional<RunConfig> find_preset(const std::string& name);

nlohmann::ordered_json to_json(const RunConfig& config);

/// Overlays the keys present in `doc` onto `config`. Unknown keys and type
/// mismatches raise ConfigError naming the offending field.
void apply_json(RunConfig& config, const nlohmann::json& doc);

/// Reads a JSON config file; parse errors carry line and column.
nlohmann::json read_config_file(const std::string& path);

RunConfig from_json(const nlohmann::json& doc);

}  // namespace backflow::cli
