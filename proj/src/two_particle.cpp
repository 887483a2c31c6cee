#include "backflow/two_particle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "backflow/errors.hpp"

namespace backflow {
namespace {

struct Component {
  Complex coefficient;
  GaussianTerm term;
};

using Expansion = std::array<Component, 2>;

Expansion position_expansion(const SuperposedState& s, const CKParams& params, double t) {
  return {{{s.coefficient_a(), packet_term(s.packet_a(), params, t)},
           {s.coefficient_b(), packet_term(s.packet_b(), params, t)}}};
}

Expansion momentum_expansion(const SuperposedState& s, const CKParams& params, double t) {
  return {{{s.coefficient_a(), momentum_term(s.packet_a(), params, t)},
           {s.coefficient_b(), momentum_term(s.packet_b(), params, t)}}};
}

Complex half_line_inner(const Expansion& lhs, const Expansion& rhs, HalfLine side) {
  Complex sum{0.0, 0.0};
  for (const auto& l : lhs) {
    if (l.coefficient == 0.0) continue;
    for (const auto& r : rhs) {
      if (r.coefficient == 0.0) continue;
      sum += std::conj(l.coefficient) * r.coefficient * half_line_gaussian_overlap(l.term, r.term, side);
    }
  }
  return sum;
}

void require_compatible(const SuperposedState& chi, const SuperposedState& phi) {
  if (chi.packet_a().sigma_p != phi.packet_a().sigma_p || chi.packet_a().eta != phi.packet_a().eta) {
    throw UnsupportedConfiguration("two-particle: chi and phi packets must share sigma_p and eta");
  }
}

// Quadrant probabilities from the half-line integrals of chi and phi.
// a_* = int_0^inf |.|^2, b_* = int_{-inf}^0 |.|^2, plus = int_0^inf chi* phi,
// minus = int_{-inf}^0 chi* phi.
QuadrantProbabilities assemble(const TwoParticleState& state, const Expansion& chi,
                               const Expansion& phi) {
  const double a_chi = half_line_inner(chi, chi, HalfLine::positive).real();
  const double b_chi = half_line_inner(chi, chi, HalfLine::negative).real();
  const double a_phi = half_line_inner(phi, phi, HalfLine::positive).real();
  const double b_phi = half_line_inner(phi, phi, HalfLine::negative).real();
  const Complex plus = half_line_inner(chi, phi, HalfLine::positive);
  const Complex minus = half_line_inner(chi, phi, HalfLine::negative);
  const double n2 = state.norm() * state.norm();
  const double s = state.sign();

  QuadrantProbabilities q{};
  q.pp = n2 * (2.0 * a_chi * a_phi + s * 2.0 * std::norm(plus));
  q.nn = n2 * (2.0 * b_chi * b_phi + s * 2.0 * std::norm(minus));
  q.pn = n2 * (a_chi * b_phi + a_phi * b_chi + s * 2.0 * (plus * std::conj(minus)).real());
  q.np = q.pn;
  q.pp = std::clamp(q.pp, 0.0, 1.0);
  q.nn = std::clamp(q.nn, 0.0, 1.0);
  q.pn = q.np = std::clamp(q.pn, 0.0, 1.0);
  return q;
}

}  // namespace

Complex overlap(const SuperposedState& chi, const SuperposedState& phi) {
  require_compatible(chi, phi);
  const CKParams initial;
  auto expansion = [&](const SuperposedState& s) { return position_expansion(s, initial, 0.0); };
  const Expansion lhs = expansion(chi);
  const Expansion rhs = expansion(phi);
  Complex sum{0.0, 0.0};
  for (const auto& l : lhs) {
    for (const auto& r : rhs) {
      sum += std::conj(l.coefficient) * r.coefficient * full_line_gaussian_overlap(l.term, r.term);
    }
  }
  return sum;
}

double fidelity(const SuperposedState& chi, const SuperposedState& phi) {
  return std::clamp(std::norm(overlap(chi, phi)), 0.0, 1.0);
}

TwoParticleState::TwoParticleState(SuperposedState chi, SuperposedState phi, Symmetry symmetry)
    : chi_(std::move(chi)), phi_(std::move(phi)), symmetry_(symmetry) {
  overlap_ = backflow::overlap(chi_, phi_);
  const double f = std::min(std::norm(overlap_), 1.0);
  if (symmetry_ == Symmetry::fermion && 1.0 - f < 1e-12) {
    throw DomainError("TwoParticleState: antisymmetrized state of identical one-particle states vanishes");
  }
  norm_ = 1.0 / std::sqrt(2.0 * (1.0 + sign() * f));
}

Complex two_particle_amplitude(const TwoParticleState& state, const CKParams& params, double x1,
                               double x2, double t) {
  const Complex chi1 = superposed_amplitude(state.chi(), params, x1, t);
  const Complex chi2 = superposed_amplitude(state.chi(), params, x2, t);
  const Complex phi1 = superposed_amplitude(state.phi(), params, x1, t);
  const Complex phi2 = superposed_amplitude(state.phi(), params, x2, t);
  return state.norm() * (chi1 * phi2 + state.sign() * (phi1 * chi2));
}

QuadrantProbabilities quadrant_probabilities(const TwoParticleState& state, const CKParams& params,
                                             double t) {
  params.validate();
  return assemble(state, position_expansion(state.chi(), params, t),
                  position_expansion(state.phi(), params, t));
}

double at_least_one_negative_probability(const TwoParticleState& state, const CKParams& params,
                                         double t) {
  // summing the small quadrants keeps relative accuracy when pp is close to 1
  const auto q = quadrant_probabilities(state, params, t);
  return std::clamp(q.nn + q.pn + q.np, 0.0, 1.0);
}

double momentum_quadrant_probability(const TwoParticleState& state, const CKParams& params, double t) {
  params.validate();
  const auto q = assemble(state, momentum_expansion(state.chi(), params, t),
                          momentum_expansion(state.phi(), params, t));
  return std::clamp(q.nn + q.pn + q.np, 0.0, 1.0);
}

double boson_fermion_initial_slope(const TwoParticleState& state, const CKParams& params) {
  constexpr double h = 1e-4;
  auto pp = [&](double t) { return quadrant_probabilities(state, params, t).pp; };
  const double f0 = pp(0.0);
  const double f1 = pp(0.5 * h);
  const double f2 = pp(h);
  const double f4 = pp(2.0 * h);
  const double coarse = (-3.0 * f0 + 4.0 * f2 - f4) / (2.0 * h);
  const double fine = (-3.0 * f0 + 4.0 * f1 - f2) / h;
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace backflow
