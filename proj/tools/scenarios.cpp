#include "scenarios.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "backflow/backflow_analysis.hpp"
#include "validation.hpp"

namespace backflow::cli {
namespace {

struct Setup {
  GaussianPacket a;
  GaussianPacket b;
  double eta;
};

Setup packets(const RunConfig& c, double eta) {
  return {{c.x0, c.p0a, c.sigma_p, eta}, {c.x0, c.p0b, c.sigma_p, eta}, eta};
}

CKParams params_for(const RunConfig& c, double gamma) { return {gamma, c.g, c.mass, c.hbar}; }

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }
  void close(const std::string& path) {
    if (file_) {
      file_->close();
      if (!*file_) throw std::runtime_error("error writing output file '" + path + "'");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void current_map(const RunConfig& c, unsigned threads, TableWriter& out) {
  const Setup s = packets(c, c.eta.front());
  const auto thetas = c.theta_axis.values();
  const auto times = c.time_axis.values();
  for (double gamma : c.gamma) {
    const auto grid = current_sign_map([&](double theta) { return SuperposedState(s.a, s.b, c.alpha, theta); },
                                       params_for(c, gamma), thetas, times, threads);
    const double scale = c.raw ? 1.0 : 1000.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      for (std::size_t k = 0; k < times.size(); ++k) {
        out.row({gamma, thetas[i], times[k], scale * grid.current_values[i][k]});
      }
    }
  }
}

void left_prob(const RunConfig& c, unsigned threads, TableWriter& out) {
  const auto times = c.time_axis.values();
  const std::size_t ne = c.eta.size();
  const std::size_t nt = times.size();
  std::vector<double> values(c.gamma.size() * ne * nt);
  parallel_for(c.gamma.size() * ne, threads, [&](std::size_t job) {
    const double gamma = c.gamma[job / ne];
    const Setup s = packets(c, c.eta[job % ne]);
    const SuperposedState state(s.a, s.b, c.alpha, c.theta);
    for (std::size_t k = 0; k < nt; ++k) values[job * nt + k] = left_probability(state, params_for(c, gamma), times[k]);
  });
  for (std::size_t job = 0; job < c.gamma.size() * ne; ++job) {
    for (std::size_t k = 0; k < nt; ++k) {
      out.row({c.gamma[job / ne], c.eta[job % ne], times[k], values[job * nt + k]});
    }
  }
}

void two_particle(const RunConfig& c, unsigned threads, TableWriter& out) {
  const Setup s = packets(c, c.eta.front());
  const SuperposedState chi(s.a, s.b, c.alpha, c.theta);
  const SuperposedState phi(s.a, s.b, c.alpha, c.theta_phi);
  const TwoParticleState boson(chi, phi, Symmetry::boson);
  const TwoParticleState fermion(chi, phi, Symmetry::fermion);
  const auto times = c.time_axis.values();
  const std::size_t nt = times.size();
  std::vector<std::pair<double, double>> values(c.gamma.size() * nt);
  parallel_for(values.size(), threads, [&](std::size_t i) {
    const CKParams p = params_for(c, c.gamma[i / nt]);
    const double t = times[i % nt];
    values[i] = {at_least_one_negative_probability(boson, p, t), at_least_one_negative_probability(fermion, p, t)};
  });
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.row({c.gamma[i / nt], times[i % nt], values[i].first, values[i].second});
  }
}

void fidelity_scan(const RunConfig& c, unsigned threads, TableWriter& out) {
  const Setup s = packets(c, c.eta.front());
  const SuperposedState chi(s.a, s.b, c.alpha, c.theta);
  const auto alphas = c.alpha_phi_axis.values();
  std::vector<double> values(alphas.size());
  parallel_for(alphas.size(), threads, [&](std::size_t i) {
    values[i] = fidelity(chi, SuperposedState(s.a, s.b, alphas[i], c.theta_phi));
  });
  for (std::size_t i = 0; i < alphas.size(); ++i) out.row({alphas[i], values[i]});
}

void fidelity_backflow(const RunConfig& c, unsigned threads, TableWriter& out, TableWriter* curves) {
  const Setup s = packets(c, c.eta.front());
  const auto times = c.time_axis.values();
  for (double gamma : c.gamma) {
    FidelityScanConfig base{s.a, s.b, c.alpha, c.theta, c.theta_phi, params_for(c, gamma), c.t_max, c.tol};
    for (const auto& r : fidelity_backflow_scan(c.alpha_phi, base, threads)) {
      out.row({gamma, r.alpha_phi, r.fidelity, r.backflow_amount});
    }
    if (!curves) continue;
    const SuperposedState chi(s.a, s.b, c.alpha, c.theta);
    const std::size_t nt = times.size();
    std::vector<double> values(c.alpha_phi.size() * nt);
    parallel_for(values.size(), threads, [&](std::size_t i) {
      const TwoParticleState boson(chi, SuperposedState(s.a, s.b, c.alpha_phi[i / nt], c.theta_phi), Symmetry::boson);
      values[i] = at_least_one_negative_probability(boson, base.params, times[i % nt]);
    });
    for (std::size_t i = 0; i < values.size(); ++i) curves->row({gamma, c.alpha_phi[i / nt], times[i % nt], values[i]});
  }
}

std::vector<std::string> columns(const RunConfig& c) {
  switch (c.scenario) {
    case Scenario::current_map:
      return {"gamma", "theta", "t", c.raw ? "j" : "j_times_1000"};
    case Scenario::left_prob:
      return {"gamma", "eta", "t", "P"};
    case Scenario::two_particle:
      return {"gamma", "t", "P_plus", "P_minus"};
    case Scenario::fidelity_scan:
      return {"alpha_phi", "fidelity"};
    case Scenario::fidelity_backflow:
      return {"gamma", "alpha_phi", "fidelity", "backflow_amount"};
    case Scenario::validate:
      break;
  }
  return {};
}

// "<out>.curves.<ext>" next to the main file
std::string curves_path(const RunConfig& c) {
  return c.out + ".curves." + (c.format == Format::csv ? "csv" : "ndjson");
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TableWriter::TableWriter(std::ostream& os, Format format, std::vector<std::string> columns)
    : os_(os), format_(format), columns_(std::move(columns)) {
  if (format_ == Format::csv) {
    for (std::size_t i = 0; i < columns_.size(); ++i) os_ << (i ? "," : "") << columns_[i];
    os_ << '\n';
  }
}

void TableWriter::row(const std::vector<double>& values) {
  if (format_ == Format::csv) {
    for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_number(values[i]);
    os_ << '\n';
    return;
  }
  os_ << '{';
  for (std::size_t i = 0; i < values.size(); ++i) {
    os_ << (i ? "," : "") << '"' << columns_[i] << "\":" << format_number(values[i]);
  }
  os_ << "}\n";
}

RunResult run(const RunConfig& config, unsigned threads, bool validate, std::ostream& fallback,
              std::ostream& log) {
  config.validate();
  RunResult result;
  if (config.scenario == Scenario::validate) {
    Sink sink(config.out, fallback);
    const auto checks = run_validation_suite(threads);
    print_validation_table(checks, sink.stream());
    sink.close(config.out);
    if (!config.out.empty()) result.outputs.push_back(config.out);
    for (const auto& c : checks) {
      if (!c.passed) result.exit_code = 1;
    }
    return result;
  }

  Sink sink(config.out, fallback);
  TableWriter out(sink.stream(), config.format, columns(config));
  switch (config.scenario) {
    case Scenario::current_map:
      current_map(config, threads, out);
      break;
    case Scenario::left_prob:
      left_prob(config, threads, out);
      break;
    case Scenario::two_particle:
      two_particle(config, threads, out);
      break;
    case Scenario::fidelity_scan:
      fidelity_scan(config, threads, out);
      break;
    case Scenario::fidelity_backflow:
      if (config.out.empty()) {
        log << "note: curves are written only with --out\n";
        fidelity_backflow(config, threads, out, nullptr);
      } else {
        const std::string path = curves_path(config);
        Sink curve_sink(path, fallback);
        TableWriter curves(curve_sink.stream(), config.format, {"gamma", "alpha_phi", "t", "P_plus"});
        fidelity_backflow(config, threads, out, &curves);
        curve_sink.close(path);
        result.outputs.push_back(path);
      }
      break;
    case Scenario::validate:
      break;
  }
  sink.close(config.out);
  if (!config.out.empty()) result.outputs.insert(result.outputs.begin(), config.out);

  if (validate) {
    const auto checks = run_validation_suite(threads);
    print_validation_table(checks, log);
    for (const auto& c : checks) {
      if (!c.passed) result.exit_code = 1;
    }
  }
  return result;
}

std::string column_help() {
  return "Output columns:\n"
         "  current-map        gamma,theta,t,j_times_1000  (j with --raw)\n"
         "  left-prob          gamma,eta,t,P\n"
         "  two-particle       gamma,t,P_plus,P_minus\n"
         "  fidelity-scan      alpha_phi,fidelity\n"
         "  fidelity-backflow  gamma,alpha_phi,fidelity,backflow_amount\n"
         "                     plus <out>.curves.csv: gamma,alpha_phi,t,P_plus\n"
         "  validate           pass/fail table; exit status 1 if any check fails\n"
         "Presets: fig1 (current-map), fig2 (left-prob), fig3 (two-particle),\n"
         "         fig4 (fidelity-scan), fig5 (fidelity-backflow)\n"
         "Precedence: flags > --config file > preset or scenario defaults.\n"
         "Threads: --threads, else BACKFLOW_THREADS, else hardware concurrency.\n";
}

}  // namespace backflow::cli
