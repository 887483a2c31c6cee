#pragma once

#include <cstddef>
#include <vector>

#include "backflow/two_particle.hpp"

namespace backflow::oracle {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Composite Gauss-Legendre rule on [a, b] with panels no wider than panel_width.
QuadratureRule composite_gauss_legendre(double a, double b, double panel_width,
                                        std::size_t nodes_per_panel = 20);

/// Integral of |Psi(x1, x2, t)|^2 over [lo1, hi1] x [lo2, hi2] by tensor-product quadrature.
double tensor_probability(const TwoParticleState& state, const CKParams& params, double t,
                          double lo1, double hi1, double lo2, double hi2);

/// A bound X beyond which both one-particle densities are negligible:
/// the largest packet center plus 14 position widths.
double support_radius(const TwoParticleState& state, const CKParams& params, double t);

/// pp by direct 2-D quadrature over [0, X]^2.
double tensor_positive_quadrant(const TwoParticleState& state, const CKParams& params, double t);

}  // namespace backflow::oracle
