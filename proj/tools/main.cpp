#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "backflow/errors.hpp"
#include "run_config.hpp"
#include "scenarios.hpp"

#ifndef BACKFLOW_VERSION
#define BACKFLOW_VERSION "unknown"
#endif

namespace {

using namespace backflow::cli;

unsigned resolve_threads(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("BACKFLOW_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    std::cerr << "warning: ignoring BACKFLOW_THREADS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const RunConfig& config, const RunResult& result, unsigned threads, double seconds) {
  nlohmann::ordered_json manifest;
  manifest["tool"] = "backflow";
  manifest["version"] = BACKFLOW_VERSION;
  manifest["config"] = to_json(config);
  manifest["threads"] = threads;
  manifest["outputs"] = result.outputs;
  manifest["exit_code"] = result.exit_code;
  manifest["wall_time_seconds"] = seconds;
  manifest["timestamp"] = utc_timestamp();
  const std::string path = config.out + ".manifest.json";
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum backflow under Caldirola-Kanai dissipation: figure data and validation."};
  app.footer(column_help());
  std::string target;
  std::string config_path;
  std::string out;
  std::string format;
  bool raw = false;
  bool validate = false;
  int threads_flag = 0;
  app.add_option("target", target, "scenario (current-map, left-prob, two-particle, fidelity-scan, "
                                    "fidelity-backflow, validate) or preset (fig1..fig5)")
      ->required();
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output path (default: stdout)");
  app.add_option("--format", format, "csv or ndjson")->check(CLI::IsMember({"csv", "ndjson"}));
  app.add_flag("--raw", raw, "current-map: write raw j instead of j_times_1000");
  app.add_flag("--validate", validate, "run the oracle validation suite after the scenario");
  app.add_option("--threads", threads_flag, "worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config;
    if (auto preset = find_preset(target)) {
      config = *preset;
    } else if (auto scenario = parse_scenario(target)) {
      config = scenario_defaults(*scenario);
    } else {
      std::cerr << "error: unknown scenario or preset '" << target << "'\n";
      return 2;
    }
    if (!config_path.empty()) apply_json(config, read_config_file(config_path));
    if (app.count("--out")) config.out = out;
    if (app.count("--format")) config.format = format == "csv" ? Format::csv : Format::ndjson;
    if (raw) config.raw = true;
    config.validate();

    const unsigned threads = resolve_threads(threads_flag);
    const auto start = std::chrono::steady_clock::now();
    const RunResult result = run(config, threads, validate, std::cout, std::cerr);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!config.out.empty()) write_manifest(config, result, threads, seconds);
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const backflow::UnsupportedConfiguration& e) {
    std::cerr << "error: unsupported configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
