#pragma once

#include "backflow/ck_dynamics.hpp"

namespace backflow {

enum class Symmetry { boson, fermion };

/// N± (chi(x1) phi(x2) ± phi(x1) chi(x2)) for two spinless particles of equal mass.
class TwoParticleState {
 public:
  /// Throws UnsupportedConfiguration if the packets of chi and phi differ in
  /// sigma_p or eta, and DomainError for a fermion pair with |<chi|phi>|^2 == 1.
  TwoParticleState(SuperposedState chi, SuperposedState phi, Symmetry symmetry);

  const SuperposedState& chi() const { return chi_; }
  const SuperposedState& phi() const { return phi_; }
  Symmetry symmetry() const { return symmetry_; }
  /// +1 for bosons, -1 for fermions.
  double sign() const { return symmetry_ == Symmetry::boson ? 1.0 : -1.0; }
  double norm() const { return norm_; }
  Complex overlap() const { return overlap_; }

 private:
  SuperposedState chi_;
  SuperposedState phi_;
  Symmetry symmetry_;
  Complex overlap_;
  double norm_;
};

struct QuadrantProbabilities {
  double pp;  ///< both particles at x > 0
  double pn;
  double np;
  double nn;

  double sum() const { return pp + pn + np + nn; }
};

/// <chi|phi>, time independent; built from the four pairwise packet overlaps.
Complex overlap(const SuperposedState& chi, const SuperposedState& phi);

/// F = |<chi|phi>|^2.
double fidelity(const SuperposedState& chi, const SuperposedState& phi);

Complex two_particle_amplitude(const TwoParticleState& state, const CKParams& params, double x1,
                               double x2, double t);

/// Position quadrant probabilities at time t; free motion only.
QuadrantProbabilities quadrant_probabilities(const TwoParticleState& state, const CKParams& params,
                                             double t);

/// Probability that at least one particle is at x <= 0, i.e. 1 - pp.
double at_least_one_negative_probability(const TwoParticleState& state, const CKParams& params,
                                         double t);

/// Probability that at least one canonical momentum is negative; constant in t
/// under free motion.
double momentum_quadrant_probability(const TwoParticleState& state, const CKParams& params, double t);

/// d pp / dt at t = 0 from a forward second-order difference (h = 1e-4)
/// improved by one Richardson step.
double boson_fermion_initial_slope(const TwoParticleState& state, const CKParams& params);

}  // namespace backflow
