#pragma once

#include <complex>

namespace backflow {

using Complex = std::complex<double>;

/// Complementary error function for complex arguments.
///
/// Relative accuracy is about 1e-14 over |z| <= 30. Conjugate symmetry and
/// erfc(z) + erfc(-z) = 2 hold by construction. Throws DomainError for
/// non-finite input or |z| >= 1e8 and RangeError when the result
/// overflows or underflows the normal double range.
Complex erfc_complex(Complex z);

/// Scaled complementary error function erfcx(z) = exp(z^2) erfc(z).
Complex erfcx_complex(Complex z);

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
Complex faddeeva(Complex z);

/// exp(log_scale) * erfc(z) evaluated as one fused product, so that a tiny
/// prefactor multiplying a huge erfc (or the reverse) stays finite.
/// Underflow of the product flushes to zero; overflow throws RangeError.
Complex scaled_erfc(Complex log_scale, Complex z);

/// exp(log_scale) * erfcx(z), fused like scaled_erfc.
Complex scaled_erfcx(Complex log_scale, Complex z);

/// A complex Gaussian g(x) = exp(log_amplitude + linear * x - quadratic * x^2).
struct GaussianTerm {
  Complex log_amplitude;
  Complex linear;
  Complex quadratic;

  Complex operator()(double x) const;
};

enum class HalfLine { positive, negative };

/// Closed form of the integral of conj(g1(x)) * g2(x) over [0, inf) or
/// (-inf, 0]. Requires Re(conj(q1) + q2) > 0, otherwise DomainError.
Complex half_line_gaussian_overlap(const GaussianTerm& g1, const GaussianTerm& g2,
                                   HalfLine side = HalfLine::positive);

/// Integral of conj(g1) * g2 over the whole real line.
Complex full_line_gaussian_overlap(const GaussianTerm& g1, const GaussianTerm& g2);

}  // namespace backflow
