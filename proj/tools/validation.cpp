#include "validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "backflow/backflow_analysis.hpp"
#include "backflow/errors.hpp"
#include "backflow/oracle/propagator.hpp"
#include "backflow/oracle/tensor_quadrature.hpp"

namespace backflow::cli {
namespace {

constexpr double kPi = std::numbers::pi;

GaussianPacket packet(double p0, double eta = 0.0) { return {0.0, p0, 0.05, eta}; }

SuperposedState paper_state(double theta = kPi) { return {packet(1.4), packet(0.3), 1.9, theta}; }

using Check = std::function<CheckResult()>;

CheckResult erfc_reflection() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Complex z{u(rng), u(rng)};
    const Complex e = erfc_complex(z);
    const double scale = std::max(1.0, std::abs(e));
    worst = std::max(worst, std::abs(e + erfc_complex(-z) - 2.0) / scale);
  }
  return {"erfc(z) + erfc(-z) = 2 (10^4 points)", worst <= 1e-12, worst, 1e-12};
}

CheckResult left_probability_quadrature() {
  double worst = 0.0;
  for (double gamma : {0.0, 0.3}) {
    for (double t : {1.0, 5.0, 10.0}) {
      const CKParams p{gamma};
      const auto s = paper_state();
      worst = std::max(worst, std::abs(left_probability(s, p, t) - left_probability(s, p, t, Method::quadrature)));
    }
  }
  return {"left probability: closed form vs quadrature", worst <= 1e-10, worst, 1e-10};
}

CheckResult propagator_distance() {
  double worst = 0.0;
  const auto s = paper_state();
  for (double gamma : {0.0, 0.3}) {
    const CKParams p{gamma};
    for (double t : {1.0, 5.0, 10.0}) {
      const auto psi = oracle::propagate_ck([&](double x) { return superposed_amplitude(s, p, x, 0.0); }, p,
                                            oracle::GridSpec{}, t);
      worst = std::max(worst, psi.l2_distance([&](double x) { return superposed_amplitude(s, p, x, t); }));
    }
  }
  return {"wave function: closed form vs split-step grid (L2)", worst <= 1e-8, worst, 1e-8};
}

CheckResult linear_potential_centroid() {
  double worst = 0.0;
  const GaussianPacket pk{0.0, 1.4, 0.05, 0.0};
  for (double gamma : {0.0, 0.3}) {
    const CKParams p{gamma, 0.02};
    const double t = 5.0;
    const auto psi = oracle::propagate_ck([&](double x) { return packet_amplitude(pk, CKParams{}, x, 0.0); }, p,
                                          oracle::GridSpec{}, t);
    const double physical = std::exp(-2.0 * gamma * t) * oracle::canonical_momentum_mean(psi, p.hbar);
    worst = std::max(worst, std::abs(physical - evolution_coefficients(pk, p, t).p_t));
  }
  return {"linear potential: momentum centroid vs p_t", worst <= 1e-8, worst, 1e-8};
}

CheckResult negative_momentum_quadrature() {
  double worst = 0.0;
  for (double theta : {0.0, 0.5 * kPi, kPi, 1.5 * kPi}) {
    const auto s = paper_state(theta);
    const double analytic = negative_momentum_probability(s);
    worst = std::max(worst, std::abs(analytic - negative_momentum_probability(s, Method::quadrature)) / analytic);
  }
  return {"Pr(P < 0): closed form vs quadrature (relative)", worst <= 1e-8, worst, 1e-8};
}

CheckResult two_particle_tensor() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> p0(0.2, 1.6);
  std::uniform_real_distribution<double> sp(0.05, 0.3);
  std::uniform_real_distribution<double> eta(0.0, 1.5);
  std::uniform_real_distribution<double> alpha(0.0, 3.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> time(0.0, 8.0);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double s = sp(rng);
    const double e = eta(rng);
    const GaussianPacket a{0.0, p0(rng), s, e};
    const GaussianPacket b{0.0, p0(rng), s, e};
    const SuperposedState chi(a, b, alpha(rng), angle(rng));
    const SuperposedState phi(a, b, alpha(rng), angle(rng));
    const TwoParticleState state(chi, phi, i % 2 == 0 ? Symmetry::boson : Symmetry::fermion);
    const double t = time(rng);
    const CKParams params{0.1 * i};
    worst = std::max(worst, std::abs(quadrant_probabilities(state, params, t).pp -
                                     oracle::tensor_positive_quadrant(state, params, t)));
  }
  return {"two-particle pp: factorized vs 2-D quadrature", worst <= 1e-8, worst, 1e-8};
}

CheckResult quadrant_sum() {
  const TwoParticleState boson(paper_state(), paper_state(1.01 * kPi), Symmetry::boson);
  const TwoParticleState fermion(paper_state(), paper_state(1.01 * kPi), Symmetry::fermion);
  double worst = 0.0;
  for (const auto* s : {&boson, &fermion}) {
    for (double t = 0.0; t <= 10.0; t += 0.5) {
      worst = std::max(worst, std::abs(quadrant_probabilities(*s, CKParams{}, t).sum() - 1.0));
    }
  }
  return {"quadrant probabilities sum to 1", worst <= 1e-10, worst, 1e-10};
}

CheckResult continuity() {
  const auto s = paper_state();
  double worst = 0.0;
  constexpr double h = 1e-4;
  for (double gamma : {0.0, 0.3}) {
    const CKParams p{gamma};
    for (double t = 0.5; t <= 10.0; t += 0.5) {
      const double rate = (left_probability(s, p, t + h) - left_probability(s, p, t - h)) / (2.0 * h);
      worst = std::max(worst, std::abs(rate + current_density(s, p, 0.0, t)));
    }
  }
  return {"continuity: dP/dt + j(0, t) = 0", worst <= 1e-6, worst, 1e-6};
}

}  // namespace

std::vector<CheckResult> run_validation_suite(unsigned threads) {
  const std::vector<Check> checks = {erfc_reflection,       left_probability_quadrature, propagator_distance,
                                     linear_potential_centroid, negative_momentum_quadrature, two_particle_tensor,
                                     quadrant_sum,          continuity};
  std::vector<CheckResult> results(checks.size());
  parallel_for(checks.size(), threads, [&](std::size_t i) {
    try {
      results[i] = checks[i]();
    } catch (const std::exception& e) {
      results[i] = {std::string("check ") + std::to_string(i) + " threw: " + e.what(), false, NAN, 0.0};
    }
  });
  return results;
}

void print_validation_table(const std::vector<CheckResult>& results, std::ostream& os) {
  char line[256];
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-4s  %-52s  %.3e  (bound %.0e)\n", r.passed ? "PASS" : "FAIL",
                  r.name.c_str(), r.measured, r.bound);
    os << line;
  }
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; });
  os << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
}

}  // namespace backflow::cli
