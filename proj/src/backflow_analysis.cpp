#include "backflow/backflow_analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "backflow/errors.hpp"

namespace backflow {
namespace {

double checked(double value, const char* what, double t) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << what << " is not finite at t = " << t;
    throw EvaluationError(msg.str());
  }
  return value;
}

struct Sample {
  double t;
  double rate;
};

bool rising(double rate) { return rate > 0.0; }

// Adds interior samples between a and b when the parabola through a, the
// midpoint and b crosses zero inside the cell, so that a pair of sign
// changes inside one cell is not missed.
void refine(const std::function<double(double)>& rate, Sample a, Sample b, int depth,
            std::vector<Sample>& out) {
  if (depth <= 0 || rising(a.rate) != rising(b.rate)) return;
  const double tm = 0.5 * (a.t + b.t);
  const Sample m{tm, checked(rate(tm), "rate", tm)};
  if (rising(m.rate) != rising(a.rate)) {
    out.push_back(m);
    return;
  }
  const double curvature = a.rate - 2.0 * m.rate + b.rate;
  if (curvature == 0.0) return;
  const double vertex = (a.rate - b.rate) / (2.0 * curvature);  // in units of the half width
  if (std::abs(vertex) > 1.0) return;
  const double extremum = m.rate - (b.rate - a.rate) * (b.rate - a.rate) / (8.0 * curvature);
  if (rising(extremum) == rising(a.rate)) return;
  refine(rate, a, m, depth - 1, out);
  out.push_back(m);
  refine(rate, m, b, depth - 1, out);
}

double bisect(const std::function<double(double)>& rate, Sample a, Sample b, double resolution) {
  while (b.t - a.t > resolution) {
    const double tm = 0.5 * (a.t + b.t);
    const Sample m{tm, checked(rate(tm), "rate", tm)};
    if (rising(m.rate) == rising(a.rate)) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a.t + b.t);
}

}  // namespace

std::vector<BackflowInterval> find_backflow_intervals(const std::function<double(double)>& prob_fn,
                                                      const std::function<double(double)>& rate_fn,
                                                      double t_max, double tol,
                                                      const DetectorOptions& options) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("find_backflow_intervals: t_max must be positive");
  if (!(tol > 0.0)) throw DomainError("find_backflow_intervals: tol must be positive");
  const std::size_t n = std::max<std::size_t>(options.initial_samples, 2);

  std::vector<Sample> samples;
  samples.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = k == n ? t_max : t_max * static_cast<double>(k) / static_cast<double>(n);
    samples.push_back({t, checked(rate_fn(t), "rate", t)});
  }
  std::vector<Sample> grid;
  grid.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    grid.push_back(samples[k]);
    if (k + 1 < samples.size()) {
      refine(rate_fn, samples[k], samples[k + 1], options.max_refinement_depth, grid);
    }
  }

  std::vector<std::pair<double, double>> windows;
  double start = 0.0;
  bool open = rising(grid.front().rate);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const Sample& a = grid[k];
    const Sample& b = grid[k + 1];
    if (rising(a.rate) == rising(b.rate)) continue;
    const double root = bisect(rate_fn, a, b, options.time_resolution);
    if (open) {
      windows.emplace_back(start, root);
      open = false;
    } else {
      start = root;
      open = true;
    }
  }
  if (open) windows.emplace_back(start, t_max);

  std::vector<BackflowInterval> intervals;
  for (const auto& [t0, t1] : windows) {
    if (!(t1 > t0)) continue;
    const double gain = checked(prob_fn(t1), "probability", t1) - checked(prob_fn(t0), "probability", t0);
    if (gain > tol) intervals.push_back({t0, t1, gain, t1});
  }
  return intervals;
}

std::vector<BackflowInterval> find_backflow_intervals(const std::function<double(double)>& prob_fn,
                                                      double t_max, double tol,
                                                      const DetectorOptions& options) {
  const double h = options.derivative_step;
  const std::function<double(double)> rate = [&prob_fn, h, t_max](double t) {
    if (t < h) {
      return (-3.0 * prob_fn(t) + 4.0 * prob_fn(t + h) - prob_fn(t + 2.0 * h)) / (2.0 * h);
    }
    if (t + h > t_max) {
      return (3.0 * prob_fn(t) - 4.0 * prob_fn(t - h) + prob_fn(t - 2.0 * h)) / (2.0 * h);
    }
    return (prob_fn(t + h) - prob_fn(t - h)) / (2.0 * h);
  };
  return find_backflow_intervals(prob_fn, rate, t_max, tol, options);
}

double backflow_amount(const std::vector<BackflowInterval>& intervals) {
  if (intervals.empty()) return 0.0;
  const auto first = std::min_element(intervals.begin(), intervals.end(),
                                      [](const auto& a, const auto& b) { return a.t_start < b.t_start; });
  return std::abs(first->probability_gain);
}

std::vector<BackflowInterval> single_particle_backflow(const SuperposedState& state,
                                                       const CKParams& params, double t_max,
                                                       double tol) {
  const std::function<double(double)> prob = [&](double t) { return left_probability(state, params, t); };
  const std::function<double(double)> rate = [&](double t) { return -current_density(state, params, 0.0, t); };
  return find_backflow_intervals(prob, rate, t_max, tol);
}

std::vector<BackflowInterval> two_particle_backflow(const TwoParticleState& state,
                                                    const CKParams& params, double t_max,
                                                    double tol) {
  const std::function<double(double)> prob = [&](double t) {
    return at_least_one_negative_probability(state, params, t);
  };
  return find_backflow_intervals(prob, t_max, tol);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

ScanGrid current_sign_map(const std::function<SuperposedState(double)>& state_family,
                          const CKParams& params, const std::vector<double>& theta_grid,
                          const std::vector<double>& time_grid, unsigned threads) {
  if (theta_grid.empty() || time_grid.empty()) throw DomainError("current_sign_map: empty grid");
  for (double t : time_grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("current_sign_map: times must be finite and >= 0");
  }
  ScanGrid grid{theta_grid, time_grid, std::vector<std::vector<double>>(theta_grid.size())};
  parallel_for(theta_grid.size(), threads, [&](std::size_t i) {
    const double theta = theta_grid[i];
    const SuperposedState state = state_family(theta);
    auto& row = grid.current_values[i];
    row.resize(time_grid.size());
    for (std::size_t k = 0; k < time_grid.size(); ++k) {
      const double t = time_grid[k];
      double j;
      try {
        j = current_density(state, params, 0.0, t);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "current_sign_map at theta = " << theta << ", t = " << t << ": " << e.what();
        throw EvaluationError(msg.str());
      }
      if (!std::isfinite(j)) {
        std::ostringstream msg;
        msg << "current_sign_map: non-finite current at theta = " << theta << ", t = " << t;
        throw EvaluationError(msg.str());
      }
      row[k] = j;
    }
  });
  return grid;
}

std::vector<FidelityBackflowRecord> fidelity_backflow_scan(const std::vector<double>& alpha_phi_values,
                                                           const FidelityScanConfig& base,
                                                           unsigned threads) {
  for (double a : alpha_phi_values) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("fidelity_backflow_scan: alpha_phi must be finite and >= 0");
  }
  std::vector<FidelityBackflowRecord> records(alpha_phi_values.size());
  const SuperposedState chi(base.packet_a, base.packet_b, base.alpha_chi, base.theta_chi);
  parallel_for(alpha_phi_values.size(), threads, [&](std::size_t i) {
    const double alpha_phi = alpha_phi_values[i];
    const SuperposedState phi(base.packet_a, base.packet_b, alpha_phi, base.theta_phi);
    const TwoParticleState boson(chi, phi, Symmetry::boson);
    auto intervals = two_particle_backflow(boson, base.params, base.t_max, base.tol);
    const double amount = backflow_amount(intervals);
    records[i] = {alpha_phi, fidelity(chi, phi), amount, std::move(intervals)};
  });
  return records;
}

}  // namespace backflow
