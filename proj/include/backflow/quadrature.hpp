#pragma once

#include <cstddef>
#include <functional>

#include "backflow/special_functions.hpp"

namespace backflow {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  std::size_t max_intervals = 5000;
  std::size_t initial_intervals = 8;
};

template <class T>
struct QuadratureResult {
  T value;
  double error;  ///< sum of per-panel |K15 - G7|, an upper bound in practice
  std::size_t evaluations;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration over [a, b]. Either
/// limit may be infinite; half-lines use x = a + t/(1-t), the full line
/// x = t/(1-t^2). Converged when error <= max(abs_tol, rel_tol*|value|);
/// otherwise throws AccuracyError carrying the best estimate.
QuadratureResult<double> adaptive_quadrature(const std::function<double(double)>& f, double a,
                                             double b, const QuadratureOptions& options = {});

QuadratureResult<Complex> adaptive_quadrature(const std::function<Complex(double)>& f, double a,
                                              double b, const QuadratureOptions& options = {});

}  // namespace backflow
