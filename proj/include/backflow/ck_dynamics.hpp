#pragma once

#include "backflow/special_functions.hpp"

namespace backflow {

/// Environment and units of the Caldirola-Kanai evolution.
struct CKParams {
  double gamma = 0.0;  ///< damping constant, 1/time
  double g = 0.0;      ///< acceleration of the linear potential V(x) = -m g x
  double mass = 1.0;
  double hbar = 1.0;

  /// Throws DomainError unless mass > 0, hbar > 0, gamma >= 0 and all finite.
  void validate() const;
};

/// Initial data of one stretched Gaussian, specified in momentum space.
struct GaussianPacket {
  double x0 = 0.0;       ///< initial center
  double p0 = 0.0;       ///< kick momentum
  double sigma_p = 1.0;  ///< momentum width
  double eta = 0.0;      ///< stretching parameter

  void validate() const;
  double sigma0(double hbar) const { return hbar / (2.0 * sigma_p); }
  /// Position spread sigma0 * sqrt(1 + eta^2).
  double position_width(double hbar) const;
};

/// Time-dependent coefficients of an evolved packet.
struct EvolutionCoefficients {
  Complex s_t;     ///< complex width
  double x_t;      ///< center
  double p_t;      ///< physical kick momentum
  double action;   ///< classical action
  double tau;      ///< effective time
};

enum class Method { analytic, quadrature };

/// tau(t) = (1 - exp(-2 gamma t)) / (2 gamma), equal to t when gamma = 0.
double effective_time(const CKParams& params, double t);

EvolutionCoefficients evolution_coefficients(const GaussianPacket& packet, const CKParams& params,
                                             double t);

/// Position-space amplitude of one packet; free motion only (g == 0).
Complex packet_amplitude(const GaussianPacket& packet, const CKParams& params, double x, double t);

/// The same amplitude as a GaussianTerm in x, for closed-form overlaps.
GaussianTerm packet_term(const GaussianPacket& packet, const CKParams& params, double t);

/// Canonical-momentum amplitude psi~(p, t), valid for any g.
Complex momentum_amplitude(const GaussianPacket& packet, const CKParams& params, double p, double t);

/// Canonical-momentum amplitude of a freely evolving packet as a GaussianTerm in p.
GaussianTerm momentum_term(const GaussianPacket& packet, const CKParams& params, double t);

/// Physical momentum density: Gaussian with mean p_t and width sigma_p exp(-2 gamma t).
double physical_momentum_distribution(const GaussianPacket& packet, const CKParams& params,
                                      double momentum, double t);

/// Pr(P < 0, t) for a single packet in the linear potential; nonincreasing in t for g >= 0.
double linear_potential_negative_momentum_probability(const GaussianPacket& packet,
                                                      const CKParams& params, double t);

/// N (psi_a + alpha e^{i theta} psi_b) built from two packets sharing x0,
/// sigma_p and eta.
class SuperposedState {
 public:
  SuperposedState(GaussianPacket packet_a, GaussianPacket packet_b, double alpha, double theta);

  const GaussianPacket& packet_a() const { return packet_a_; }
  const GaussianPacket& packet_b() const { return packet_b_; }
  double alpha() const { return alpha_; }
  double theta() const { return theta_; }
  double norm() const { return norm_; }

  /// Expansion coefficients of the two packets: N and N alpha e^{i theta}.
  Complex coefficient_a() const { return norm_; }
  Complex coefficient_b() const;

  /// exp(-(p0a - p0b)^2 (1 + eta^2) / (8 sigma_p^2)), the packets' mutual overlap.
  double packet_overlap() const;

 private:
  GaussianPacket packet_a_;
  GaussianPacket packet_b_;
  double alpha_;
  double theta_;
  double norm_;
};

struct BackflowProbeResult {
  double time;
  double current_at_origin;
  double left_probability;
};

Complex superposed_amplitude(const SuperposedState& state, const CKParams& params, double x, double t);

/// d psi / dx of the superposition.
Complex superposed_gradient(const SuperposedState& state, const CKParams& params, double x, double t);

/// Canonical-momentum amplitude of the superposition.
Complex superposed_momentum_amplitude(const SuperposedState& state, const CKParams& params,
                                      double p, double t);

/// j(x, t) = (hbar/m) Im(psi* dpsi/dx) exp(-2 gamma t).
double current_density(const SuperposedState& state, const CKParams& params, double x, double t);

/// Probability of x <= 0 at time t.
double left_probability(const SuperposedState& state, const CKParams& params, double t,
                        Method method = Method::analytic);

/// Pr(P < 0), time independent under free motion.
double negative_momentum_probability(const SuperposedState& state, Method method = Method::analytic);

BackflowProbeResult probe_backflow(const SuperposedState& state, const CKParams& params, double t);

}  // namespace backflow
