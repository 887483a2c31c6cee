#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "backflow/ck_dynamics.hpp"
#include "backflow/two_particle.hpp"

namespace backflow {

/// A maximal time window on which the left-side probability increases.
struct BackflowInterval {
  double t_start;
  double t_end;
  double probability_gain;  ///< P(t_end) - P(t_start)
  double t_max;             ///< time of the local maximum of P, here t_end
};

struct DetectorOptions {
  std::size_t initial_samples = 2048;
  int max_refinement_depth = 8;
  double time_resolution = 1e-6;
  double derivative_step = 1e-5;  ///< finite-difference step when no rate is supplied
};

/// Intervals of [0, t_max] on which prob_fn rises by more than tol, ordered by
/// t_start. The rate is a finite difference of prob_fn.
std::vector<BackflowInterval> find_backflow_intervals(const std::function<double(double)>& prob_fn,
                                                      double t_max, double tol = 1e-9,
                                                      const DetectorOptions& options = {});

/// Same, with an explicit rate dP/dt used for bracketing.
std::vector<BackflowInterval> find_backflow_intervals(const std::function<double(double)>& prob_fn,
                                                      const std::function<double(double)>& rate_fn,
                                                      double t_max, double tol = 1e-9,
                                                      const DetectorOptions& options = {});

/// |P(t_m) - P(0)| of the first backflow interval; 0 when there is none.
double backflow_amount(const std::vector<BackflowInterval>& intervals);

/// One particle: P(t) = left_probability, dP/dt = -j(0, t).
std::vector<BackflowInterval> single_particle_backflow(const SuperposedState& state,
                                                       const CKParams& params, double t_max,
                                                       double tol = 1e-9);

/// Two particles: P(t) = 1 - pp(t), rate by finite differences.
std::vector<BackflowInterval> two_particle_backflow(const TwoParticleState& state,
                                                    const CKParams& params, double t_max,
                                                    double tol = 1e-9);

struct ScanGrid {
  std::vector<double> theta_values;
  std::vector<double> time_values;
  /// current_values[i][k] = j(0, time_values[k]) for theta_values[i]
  std::vector<std::vector<double>> current_values;
};

/// Raw j(0, t) over a (theta, t) grid. Rows are split across threads; the
/// result does not depend on the thread count.
ScanGrid current_sign_map(const std::function<SuperposedState(double)>& state_family,
                          const CKParams& params, const std::vector<double>& theta_grid,
                          const std::vector<double>& time_grid, unsigned threads = 1);

struct FidelityScanConfig {
  GaussianPacket packet_a;
  GaussianPacket packet_b;
  double alpha_chi = 1.9;
  double theta_chi = 0.0;
  double theta_phi = 0.0;
  CKParams params;
  double t_max = 10.0;
  double tol = 1e-9;
};

struct FidelityBackflowRecord {
  double alpha_phi;
  double fidelity;
  double backflow_amount;
  std::vector<BackflowInterval> intervals;
};

/// For each alpha_phi: fidelity of chi and phi, and the boson backflow amount.
std::vector<FidelityBackflowRecord> fidelity_backflow_scan(const std::vector<double>& alpha_phi_values,
                                                           const FidelityScanConfig& base,
                                                           unsigned threads = 1);

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace backflow
