#include "backflow/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "backflow/errors.hpp"

namespace backflow {
namespace {

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for Kronrod nodes 1, 3, 5 and 7 (the center).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double left;
  double right;
  Complex value;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod_panel(const std::function<Complex(double)>& h, double left, double right) {
  const double center = 0.5 * (left + right);
  const double half = 0.5 * (right - left);
  Complex kronrod = kKronrodWeights[7] * h(center);
  Complex gauss = kGaussWeights[3] * h(center);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const Complex sum = h(center - dx) + h(center + dx);
    kronrod += kKronrodWeights[i] * sum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  if (!std::isfinite(kronrod.real()) || !std::isfinite(kronrod.imag())) {
    throw EvaluationError("adaptive_quadrature: integrand produced non-finite values");
  }
  return {left, right, kronrod, std::abs(kronrod - gauss)};
}

QuadratureResult<Complex> integrate_finite(const std::function<Complex(double)>& h, double a,
                                           double b, const QuadratureOptions& options) {
  std::priority_queue<Panel> panels;
  Complex total{0.0, 0.0};
  double error = 0.0;
  const std::size_t initial = std::max<std::size_t>(1, options.initial_intervals);
  for (std::size_t i = 0; i < initial; ++i) {
    const double l = a + (b - a) * static_cast<double>(i) / static_cast<double>(initial);
    const double r = i + 1 == initial ? b : a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(initial);
    Panel p = kronrod_panel(h, l, r);
    total += p.value;
    error += p.error;
    panels.push(p);
  }
  std::size_t evaluations = 15 * initial;

  auto converged = [&] {
    return error <= std::max(options.abs_tol, options.rel_tol * std::abs(total));
  };
  while (!converged()) {
    if (panels.size() >= options.max_intervals) {
      throw AccuracyError("adaptive_quadrature: interval limit reached", std::abs(total), error);
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.left + worst.right);
    if (!(mid > worst.left && mid < worst.right)) {
      throw AccuracyError("adaptive_quadrature: panel width reached machine resolution",
                          std::abs(total), error);
    }
    Panel lower = kronrod_panel(h, worst.left, mid);
    Panel upper = kronrod_panel(h, mid, worst.right);
    evaluations += 30;
    // recompute the totals from the queue occasionally to stop drift
    total += lower.value + upper.value - worst.value;
    error += lower.error + upper.error - worst.error;
    panels.push(lower);
    panels.push(upper);
    if (panels.size() % 256 == 0) {
      auto copy = panels;
      total = {0.0, 0.0};
      error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, error, evaluations};
}

}  // namespace

QuadratureResult<Complex> adaptive_quadrature(const std::function<Complex(double)>& f, double a,
                                              double b, const QuadratureOptions& options) {
  if (!(options.abs_tol > 0.0) && !(options.rel_tol > 0.0)) {
    throw DomainError("adaptive_quadrature: a positive tolerance is required");
  }
  if (std::isnan(a) || std::isnan(b)) throw DomainError("adaptive_quadrature: NaN limit");
  if (a == b) return {{0.0, 0.0}, 0.0, 0};
  if (a > b) {
    auto r = adaptive_quadrature(f, b, a, options);
    r.value = -r.value;
    return r;
  }
  const bool lower_inf = std::isinf(a);
  const bool upper_inf = std::isinf(b);
  if (!lower_inf && !upper_inf) return integrate_finite(f, a, b, options);
  if (lower_inf && upper_inf) {
    auto h = [&f](double t) {
      const double d = 1.0 - t * t;
      return f(t / d) * ((1.0 + t * t) / (d * d));
    };
    return integrate_finite(h, -1.0, 1.0, options);
  }
  if (upper_inf) {
    auto h = [&f, a](double t) {
      const double d = 1.0 - t;
      return f(a + t / d) / (d * d);
    };
    return integrate_finite(h, 0.0, 1.0, options);
  }
  auto h = [&f, b](double t) {
    const double d = 1.0 - t;
    return f(b - t / d) / (d * d);
  };
  return integrate_finite(h, 0.0, 1.0, options);
}

QuadratureResult<double> adaptive_quadrature(const std::function<double(double)>& f, double a,
                                             double b, const QuadratureOptions& options) {
  const std::function<Complex(double)> lifted = [&f](double x) { return Complex{f(x), 0.0}; };
  const auto r = adaptive_quadrature(lifted, a, b, options);
  return {r.value.real(), r.error, r.evaluations};
}

}  // namespace backflow
