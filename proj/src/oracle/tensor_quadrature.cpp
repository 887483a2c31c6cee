#include "backflow/oracle/tensor_quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "backflow/errors.hpp"

namespace backflow::oracle {

QuadratureRule composite_gauss_legendre(double a, double b, double panel_width,
                                        std::size_t nodes_per_panel) {
  if (!(b > a) || !(panel_width > 0.0) || nodes_per_panel == 0) {
    throw DomainError("composite_gauss_legendre: need a < b, panel_width > 0, nodes > 0");
  }
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(nodes_per_panel), &gsl_integration_glfixed_table_free);
  const auto panels = static_cast<std::size_t>(std::ceil((b - a) / panel_width));
  const double width = (b - a) / static_cast<double>(panels);
  QuadratureRule rule;
  rule.nodes.reserve(panels * nodes_per_panel);
  rule.weights.reserve(panels * nodes_per_panel);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double hi = p + 1 == panels ? b : lo + width;
    for (std::size_t i = 0; i < nodes_per_panel; ++i) {
      double x = 0.0;
      double w = 0.0;
      gsl_integration_glfixed_point(lo, hi, i, &x, &w, table.get());
      rule.nodes.push_back(x);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

double tensor_probability(const TwoParticleState& state, const CKParams& params, double t,
                          double lo1, double hi1, double lo2, double hi2) {
  const auto r1 = composite_gauss_legendre(lo1, hi1, 2.0);
  const auto r2 = composite_gauss_legendre(lo2, hi2, 2.0);
  auto tabulate = [&](const SuperposedState& s, const QuadratureRule& r) {
    std::vector<Complex> v(r.nodes.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = superposed_amplitude(s, params, r.nodes[i], t);
    return v;
  };
  const auto chi1 = tabulate(state.chi(), r1);
  const auto phi1 = tabulate(state.phi(), r1);
  const auto chi2 = tabulate(state.chi(), r2);
  const auto phi2 = tabulate(state.phi(), r2);
  const double s = state.sign();
  double total = 0.0;
  for (std::size_t i = 0; i < r1.nodes.size(); ++i) {
    double row = 0.0;
    for (std::size_t k = 0; k < r2.nodes.size(); ++k) {
      row += r2.weights[k] * std::norm(chi1[i] * phi2[k] + s * (phi1[i] * chi2[k]));
    }
    total += r1.weights[i] * row;
  }
  return state.norm() * state.norm() * total;
}

double support_radius(const TwoParticleState& state, const CKParams& params, double t) {
  double radius = 0.0;
  for (const auto* s : {&state.chi(), &state.phi()}) {
    for (const auto* packet : {&s->packet_a(), &s->packet_b()}) {
      const auto c = evolution_coefficients(*packet, params, t);
      radius = std::max(radius, std::abs(c.x_t) + 14.0 * std::abs(c.s_t));
    }
  }
  return radius;
}

double tensor_positive_quadrant(const TwoParticleState& state, const CKParams& params, double t) {
  const double x = support_radius(state, params, t);
  return tensor_probability(state, params, t, 0.0, x, 0.0, x);
}

}  // namespace backflow::oracle
