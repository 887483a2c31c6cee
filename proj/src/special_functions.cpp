#include "backflow/special_functions.hpp"

#include <array>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <string>

#include "backflow/errors.hpp"

namespace backflow {
namespace {

constexpr double kInvSqrtPi = 0.56418958354775628694807945156077259;
const double kLogMax = std::log(DBL_MAX);
const double kLogMin = std::log(DBL_MIN);

// Weideman's rational approximation of w(z) in the upper half plane,
//   w(z) = 2 p(Z) / (L - iz)^2 + (1/sqrt(pi)) / (L - iz),  Z = (L + iz)/(L - iz),
// with the polynomial coefficients obtained from a DFT of exp(-t^2)(L^2 + t^2)
// sampled on t = L tan(theta/2). 48 terms give ~1e-15 relative accuracy.
constexpr int kWeidemanTerms = 48;

struct WeidemanTable {
  double scale;
  std::array<double, kWeidemanTerms> coeff;  // coeff[j] multiplies Z^j
};

WeidemanTable build_weideman_table() {
  constexpr int n = kWeidemanTerms;
  constexpr int m = 2 * n;
  constexpr int m2 = 2 * m;
  const long double pi = std::numbers::pi_v<long double>;
  const long double scale = std::sqrt(static_cast<long double>(n) / std::sqrt(2.0L));

  std::array<long double, m2> samples{};
  for (int idx = 1; idx < m2; ++idx) {
    const int k = idx - m;
    const long double t = scale * std::tan(static_cast<long double>(k) * pi / (2.0L * m));
    samples[idx] = std::exp(-t * t) * (scale * scale + t * t);
  }
  // fftshift for an even-length sequence is a rotation by half its length
  std::array<long double, m2> shifted{};
  for (int i = 0; i < m2; ++i) shifted[i] = samples[(i + m2 / 2) % m2];

  WeidemanTable table{};
  table.scale = static_cast<double>(scale);
  for (int j = 1; j <= n; ++j) {
    long double acc = 0.0L;
    for (int k = 0; k < m2; ++k) {
      acc += shifted[k] * std::cos(2.0L * pi * static_cast<long double>(j) * k / m2);
    }
    table.coeff[j - 1] = static_cast<double>(acc / m2);
  }
  return table;
}

const WeidemanTable& weideman_table() {
  static const WeidemanTable table = build_weideman_table();
  return table;
}

// w(z) for Im z >= 0.
Complex faddeeva_upper(Complex z) {
  const auto& table = weideman_table();
  const Complex iz{-z.imag(), z.real()};
  const Complex denom = table.scale - iz;
  const Complex zz = (table.scale + iz) / denom;
  Complex poly = table.coeff[kWeidemanTerms - 1];
  for (int j = kWeidemanTerms - 2; j >= 0; --j) poly = poly * zz + table.coeff[j];
  return 2.0 * poly / (denom * denom) + kInvSqrtPi / denom;
}

// Error-free transformations.
struct DoubleDouble {
  double hi;
  double lo;
};

DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

// A complex exponent carried as hi + lo in each component so that large
// exponents (|z^2| up to ~1e3) keep full relative accuracy after exp().
struct SplitExponent {
  DoubleDouble re;
  DoubleDouble im;
};

SplitExponent signed_square(Complex z, double sign) {
  const auto xx = two_prod(z.real(), z.real());
  const auto yy = two_prod(z.imag(), z.imag());
  const auto xy = two_prod(2.0 * z.real(), z.imag());
  // sign * (x^2 - y^2) + i sign * 2xy
  auto re = two_sum(sign * xx.hi, -sign * yy.hi);
  re.lo += sign * (xx.lo - yy.lo);
  return {re, {sign * xy.hi, sign * xy.lo}};
}

SplitExponent add(SplitExponent e, Complex c) {
  auto re = two_sum(e.re.hi, c.real());
  auto im = two_sum(e.im.hi, c.imag());
  return {{re.hi, re.lo + e.re.lo}, {im.hi, im.lo + e.im.lo}};
}

enum class Underflow { raise, flush };

// exp(e) * factor, with |factor| folded into the exponent before
// exponentiating so the product is formed without intermediate overflow.
Complex exp_times(SplitExponent e, Complex factor, Underflow on_underflow) {
  const double mag = std::abs(factor);
  if (mag == 0.0) return {0.0, 0.0};
  const auto log_mag = two_sum(e.re.hi, std::log(mag));
  const double lo = log_mag.lo + e.re.lo;
  const double total = log_mag.hi + lo;
  if (total > kLogMax) {
    throw RangeError("erfc: result overflows double range");
  }
  if (total < kLogMin) {
    if (on_underflow == Underflow::flush) return {0.0, 0.0};
    throw RangeError("erfc: result underflows double range");
  }
  const double modulus = std::exp(log_mag.hi) * (1.0 + lo);
  const double phase_lo = e.im.lo;
  const double c = std::cos(e.im.hi);
  const double s = std::sin(e.im.hi);
  const Complex rotation{c - s * phase_lo, s + c * phase_lo};
  return modulus * rotation * (factor / mag);
}

void check_argument(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("erfc: non-finite argument");
  }
  if (std::abs(z) >= 1e8) {
    throw DomainError("erfc: |z| >= 1e8 is outside the supported range");
  }
}

// exp(-z^2) w(iz) for Re z >= 0, the direct representation of erfc(z).
Complex erfc_right(Complex z, Underflow on_underflow) {
  const Complex w = faddeeva_upper(Complex{-z.imag(), z.real()});
  return exp_times(signed_square(z, -1.0), w, on_underflow);
}

// erfc on the closed upper half plane.
Complex erfc_upper(Complex z) {
  if (z.real() >= 0.0) return erfc_right(z, Underflow::raise);
  // erfc(z) = 2 - erfc(-z), and erfc(-z) = conj(erfc(conj(-z)))
  const Complex mirrored = std::conj(erfc_right(Complex{-z.real(), z.imag()}, Underflow::flush));
  return 2.0 - mirrored;
}

}  // namespace

Complex faddeeva(Complex z) {
  check_argument(z);
  if (z.imag() >= 0.0) return faddeeva_upper(z);
  // w(z) = 2 exp(-z^2) - w(-z)
  const Complex reflected = faddeeva_upper(-z);
  return exp_times(signed_square(z, -1.0), Complex{2.0, 0.0}, Underflow::flush) - reflected;
}

Complex erfc_complex(Complex z) {
  check_argument(z);
  if (z.imag() == 0.0) {
    const double x = z.real();
    if (x > 0.0) {
      const double r = std::erfc(x);
      if (r < DBL_MIN) throw RangeError("erfc: result underflows double range");
      return {r, 0.0};
    }
    return {std::erfc(x), 0.0};
  }
  if (z.imag() < 0.0) return std::conj(erfc_upper(std::conj(z)));
  return erfc_upper(z);
}

Complex erfcx_complex(Complex z) {
  check_argument(z);
  return scaled_erfcx(Complex{0.0, 0.0}, z);
}

Complex scaled_erfc(Complex log_scale, Complex z) {
  check_argument(z);
  if (!std::isfinite(log_scale.real()) || !std::isfinite(log_scale.imag())) {
    throw DomainError("scaled_erfc: non-finite log scale");
  }
  if (z.real() >= 0.0) {
    const Complex w = faddeeva_upper(Complex{-z.imag(), z.real()});
    return exp_times(add(signed_square(z, -1.0), log_scale), w, Underflow::flush);
  }
  // exp(s) erfc(z) = 2 exp(s) - exp(s - z^2) w(-iz)
  const Complex w = faddeeva_upper(Complex{z.imag(), -z.real()});
  const SplitExponent plain{{log_scale.real(), 0.0}, {log_scale.imag(), 0.0}};
  return exp_times(plain, Complex{2.0, 0.0}, Underflow::flush) -
         exp_times(add(signed_square(z, -1.0), log_scale), w, Underflow::flush);
}

Complex scaled_erfcx(Complex log_scale, Complex z) {
  check_argument(z);
  if (!std::isfinite(log_scale.real()) || !std::isfinite(log_scale.imag())) {
    throw DomainError("scaled_erfcx: non-finite log scale");
  }
  const SplitExponent plain{{log_scale.real(), 0.0}, {log_scale.imag(), 0.0}};
  if (z.real() >= 0.0) {
    const Complex w = faddeeva_upper(Complex{-z.imag(), z.real()});
    return exp_times(plain, w, Underflow::flush);
  }
  // exp(s) erfcx(z) = 2 exp(s + z^2) - exp(s) w(-iz)
  const Complex w = faddeeva_upper(Complex{z.imag(), -z.real()});
  return exp_times(add(signed_square(z, 1.0), log_scale), Complex{2.0, 0.0}, Underflow::flush) -
         exp_times(plain, w, Underflow::flush);
}

Complex GaussianTerm::operator()(double x) const {
  return std::exp(log_amplitude + linear * x - quadratic * (x * x));
}

namespace {

struct CombinedExponent {
  Complex quadratic;
  Complex linear;
  Complex constant;
};

CombinedExponent combine(const GaussianTerm& g1, const GaussianTerm& g2) {
  CombinedExponent c{std::conj(g1.quadratic) + g2.quadratic, std::conj(g1.linear) + g2.linear,
                     std::conj(g1.log_amplitude) + g2.log_amplitude};
  if (!(c.quadratic.real() > 0.0)) {
    throw DomainError("gaussian overlap: combined exponent is not integrable (Re quadratic = " +
                      std::to_string(c.quadratic.real()) + ")");
  }
  return c;
}

}  // namespace

Complex half_line_gaussian_overlap(const GaussianTerm& g1, const GaussianTerm& g2, HalfLine side) {
  const auto c = combine(g1, g2);
  const Complex linear = side == HalfLine::positive ? c.linear : -c.linear;
  // int_0^inf exp(-A x^2 + B x + L) dx = (1/2) sqrt(pi/A) exp(L) erfcx(-B / (2 sqrt A))
  const Complex root = std::sqrt(c.quadratic);
  const Complex u = -linear / (2.0 * root);
  return 0.5 * std::sqrt(std::numbers::pi) / root * scaled_erfcx(c.constant, u);
}

Complex full_line_gaussian_overlap(const GaussianTerm& g1, const GaussianTerm& g2) {
  const auto c = combine(g1, g2);
  const Complex root = std::sqrt(c.quadratic);
  const Complex u = c.linear / (2.0 * root);
  return std::sqrt(std::numbers::pi) / root * std::exp(c.constant + u * u);
}

}  // namespace backflow
