#include <doctest.h>

#include <cmath>
#include <random>

#include "backflow/ck_dynamics.hpp"
#include "backflow/errors.hpp"
#include "backflow/quadrature.hpp"
#include "support.hpp"

using namespace backflow;
using testing::kPi;

namespace {

// Closed forms evaluated in long double, without any small-gamma rearrangement.
struct LongDoubleCoefficients {
  long double x_t;
  long double action;
};

LongDoubleCoefficients direct_coefficients(const GaussianPacket& pk, const CKParams& p, double t) {
  const long double gamma = p.gamma;
  const long double m = p.mass;
  const long double g = p.g;
  const long double p0 = pk.p0;
  const long double x0 = pk.x0;
  const long double u = 2.0L * gamma * t;
  const long double tau = (1.0L - std::exp(-u)) / (2.0L * gamma);
  LongDoubleCoefficients c;
  c.x_t = x0 + p0 * tau / m + g * (u - 1.0L + std::exp(-u)) / (4.0L * gamma * gamma);
  c.action = p0 * p0 * tau / (2.0L * m) +
             g * (p0 * (std::cosh(u) - 1.0L) / (2.0L * gamma * gamma) + m * x0 * std::exp(u) * tau) +
             m * g * g * (4.0L + (2.0L * u - 3.0L) * std::exp(u) - std::exp(-u)) / (16.0L * gamma * gamma * gamma);
  return c;
}

double left_probability_erfc_form(const SuperposedState& s, const CKParams& p, double t) {
  const double sp = s.packet_a().sigma_p;
  const double eta = s.packet_a().eta;
  const double pa = s.packet_a().p0;
  const double pb = s.packet_b().p0;
  const double m = p.mass;
  const double hbar = p.hbar;
  const double tau = effective_time(p, t);
  const double sigma_t = hbar / (2.0 * sp) * std::hypot(1.0, 2.0 * sp * sp * tau / (m * hbar) + eta);
  const double xa = pa * tau / m;
  const double xb = pb * tau / m;
  const Complex d{(pa + pb) * tau / (2.0 * m),
                  -(m * hbar * (1.0 + eta * eta) / (2.0 * sp * sp) + eta * tau) * (pa - pb) / (2.0 * m)};
  const double r2 = std::sqrt(2.0) * sigma_t;
  const double alpha = s.alpha();
  const double kappa = std::exp(-(pa - pb) * (pa - pb) * (1.0 + eta * eta) / (8.0 * sp * sp));
  const Complex cross = std::polar(1.0, s.theta()) * erfc_complex(d / r2);
  const double n = s.norm();
  return 0.5 * n * n *
         (std::erfc(xa / r2) + alpha * alpha * std::erfc(xb / r2) + alpha * kappa * 2.0 * cross.real());
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  QuadratureOptions opt;
  opt.abs_tol = tol;
  return adaptive_quadrature(f, a, b, opt).value;
}

}  // namespace

TEST_SUITE("ck_dynamics") {

TEST_CASE("effective time") {
  CHECK(effective_time(CKParams{0.0}, 3.5) == 3.5);
  CHECK(effective_time(CKParams{0.3}, 2.0) == doctest::Approx((1.0 - std::exp(-1.2)) / 0.6).epsilon(1e-15));
  CHECK(effective_time(CKParams{1e-9}, 2.0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(effective_time(CKParams{0.3}, 1e6) == doctest::Approx(1.0 / 0.6));
  CHECK_THROWS_AS(effective_time(CKParams{0.3}, -1.0), DomainError);
}

TEST_CASE("free drift of the center") {
  const auto c = evolution_coefficients(testing::fast_packet(), CKParams{0.3}, 2.0);
  CHECK(c.x_t == doctest::Approx(1.4 * (1.0 - std::exp(-1.2)) / 0.6).epsilon(1e-15));
  CHECK(c.p_t == doctest::Approx(1.4 * std::exp(-1.2)).epsilon(1e-15));
}

TEST_CASE("coefficients match long-double closed forms on both sides of the series switch") {
  const GaussianPacket pk{0.7, 1.1, 0.2, 0.4};
  for (double u : {1e-3, 0.05, 0.3, 0.49, 0.5, 0.51, 1.0, 3.0, 8.0}) {
    const double t = 2.5;
    const CKParams p{u / (2.0 * t), 0.35, 1.3, 0.9};
    const auto got = evolution_coefficients(pk, p, t);
    const auto want = direct_coefficients(pk, p, t);
    // the long-double reference itself cancels about |log10 u^3| digits
    const double tol = u < 0.01 ? 1e-9 : 1e-13;
    CHECK(got.x_t == doctest::Approx(static_cast<double>(want.x_t)).epsilon(tol));
    CHECK(got.action == doctest::Approx(static_cast<double>(want.action)).epsilon(tol));
  }
}

TEST_CASE("vanishing damping limits") {
  const GaussianPacket pk{0.7, 1.1, 0.2, 0.4};
  const double t = 3.0;
  const double g = 0.35;
  const double m = 1.3;
  const auto c0 = evolution_coefficients(pk, CKParams{0.0, g, m}, t);
  CHECK(c0.x_t == doctest::Approx(0.7 + 1.1 * t / m + 0.5 * g * t * t).epsilon(1e-15));
  CHECK(c0.action == doctest::Approx(1.1 * 1.1 * t / (2.0 * m) + g * (1.1 * t * t + m * 0.7 * t) +
                                     m * g * g * t * t * t / 3.0)
                         .epsilon(1e-15));
  const auto c1 = evolution_coefficients(pk, CKParams{1e-7, g, m}, t);
  CHECK(c1.action == doctest::Approx(c0.action).epsilon(1e-6));
  CHECK(c1.x_t == doctest::Approx(c0.x_t).epsilon(1e-6));
}

TEST_CASE("packet is normalized and matches its gaussian term") {
  for (double gamma : {0.0, 0.3}) {
    for (double t : {0.0, 4.0}) {
      const GaussianPacket pk{-3.0, 0.8, 0.1, 1.5};
      const CKParams p{gamma};
      const double norm = integrate([&](double x) { return std::norm(packet_amplitude(pk, p, x, t)); }, -INFINITY, INFINITY);
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
      const auto term = packet_term(pk, p, t);
      for (double x : {-20.0, -3.0, 0.0, 5.5}) {
        const Complex a = packet_amplitude(pk, p, x, t);
        CHECK(std::abs(term(x) - a) <= 1e-13);
      }
    }
  }
}

TEST_CASE("position amplitude is the Fourier transform of the momentum amplitude") {
  const GaussianPacket pk{2.0, 0.9, 0.3, 0.7};
  for (double gamma : {0.0, 0.2}) {
    const CKParams p{gamma};
    for (double t : {0.0, 1.5}) {
      for (double x : {-1.0, 2.0, 4.0}) {
        const std::function<Complex(double)> f = [&](double q) {
          return momentum_amplitude(pk, p, q, t) * std::polar(1.0, q * x / p.hbar);
        };
        QuadratureOptions opt;
        opt.abs_tol = 1e-14;
        const Complex psi = adaptive_quadrature(f, -INFINITY, INFINITY, opt).value / std::sqrt(2.0 * kPi * p.hbar);
        CHECK(std::abs(psi - packet_amplitude(pk, p, x, t)) <= 1e-12);
      }
      for (double q : {0.2, 0.9, 1.4}) {
        CHECK(std::abs(momentum_term(pk, p, t)(q) - momentum_amplitude(pk, p, q, t)) <= 1e-13);
      }
    }
  }
}

TEST_CASE("physical momentum distribution") {
  const GaussianPacket pk{0.0, 1.4, 0.05, 0.5};
  const CKParams p{0.2, 0.1};
  const double t = 3.0;
  const auto c = evolution_coefficients(pk, p, t);
  const double norm = integrate([&](double q) { return physical_momentum_distribution(pk, p, q, t); }, -INFINITY, INFINITY);
  const double mean = integrate([&](double q) { return q * physical_momentum_distribution(pk, p, q, t); }, -INFINITY, INFINITY);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean == doctest::Approx(c.p_t).epsilon(1e-12));
  // |psi~(p)|^2 dp maps onto P = e^{-2 gamma t} p
  const double q = 0.9;
  const double jac = std::exp(2.0 * p.gamma * t);
  CHECK(physical_momentum_distribution(pk, p, q, t) ==
        doctest::Approx(jac * std::norm(momentum_amplitude(pk, p, jac * q, t))).epsilon(1e-12));
}

TEST_CASE("linear potential: negative momentum probability") {
  const GaussianPacket pk{0.0, 0.1, 0.05, 0.0};
  const CKParams p{0.1, 0.02};
  double previous = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double t = 0.1 * i;
    const double v = linear_potential_negative_momentum_probability(pk, p, t);
    CHECK(v <= previous);
    previous = v;
  }
  const double t = 2.0;
  const double quad = integrate([&](double q) { return std::norm(momentum_amplitude(pk, p, q, t)); }, -INFINITY, 0.0, 1e-15);
  CHECK(linear_potential_negative_momentum_probability(pk, p, t) == doctest::Approx(quad).epsilon(1e-10));
  CHECK(linear_potential_negative_momentum_probability(pk, CKParams{0.1, 0.0}, 0.0) ==
        doctest::Approx(0.5 * std::erfc(0.1 / (std::sqrt(2.0) * 0.05))).epsilon(1e-14));
  CHECK_THROWS_AS(linear_potential_negative_momentum_probability(pk, CKParams{0.1, -1.0}, 1.0), DomainError);
}

TEST_CASE("superposition normalization") {
  for (double theta : {0.0, 1.0, kPi}) {
    for (double eta : {0.0, 2.0}) {
      const auto s = testing::reference_state(theta, 1.9, eta);
      const CKParams p{0.1};
      const double norm = integrate([&](double x) { return std::norm(superposed_amplitude(s, p, x, 3.0)); }, -INFINITY, INFINITY);
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  // overlapping packets make the interference term matter
  const SuperposedState close({0.0, 1.0, 0.5, 0.3}, {0.0, 0.6, 0.5, 0.3}, 0.8, 2.0);
  const double norm = integrate([&](double x) { return std::norm(superposed_amplitude(close, CKParams{}, x, 1.0)); }, -INFINITY, INFINITY);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("superposition preconditions") {
  CHECK_THROWS_AS(SuperposedState({0.0, 1.0, 0.05, 0.0}, {0.0, 0.3, 0.06, 0.0}, 1.0, 0.0), UnsupportedConfiguration);
  CHECK_THROWS_AS(SuperposedState({0.0, 1.0, 0.05, 0.0}, {0.0, 0.3, 0.05, 0.1}, 1.0, 0.0), UnsupportedConfiguration);
  CHECK_THROWS_AS(SuperposedState({0.0, 1.0, 0.05, 0.0}, {1.0, 0.3, 0.05, 0.0}, 1.0, 0.0), UnsupportedConfiguration);
  CHECK_THROWS_AS(SuperposedState({0.0, 1.0, 0.05, 0.0}, {0.0, 1.0, 0.05, 0.0}, 1.0, kPi), DomainError);
  CHECK_THROWS_AS(SuperposedState({0.0, 1.0, -0.05, 0.0}, {0.0, 1.0, -0.05, 0.0}, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(SuperposedState({0.0, 1.0, 0.05, 0.0}, {0.0, 0.3, 0.05, 0.0}, NAN, 0.0), DomainError);
  const auto s = testing::reference_state();
  CHECK_THROWS_AS(superposed_amplitude(s, CKParams{0.0, 0.1}, 0.0, 1.0), UnsupportedConfiguration);
  CHECK_THROWS_AS(superposed_amplitude(s, CKParams{0.0, 0.0, -1.0}, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(left_probability(s, CKParams{-0.1}, 1.0), DomainError);
  CHECK_THROWS_AS(left_probability(s, CKParams{}, -1.0), DomainError);
}

TEST_CASE("current density is (hbar/m) Im(psi* psi') e^{-2 gamma t}") {
  const auto s = testing::reference_state(2.0, 1.2, 0.5);
  const CKParams p{0.2, 0.0, 1.7, 0.8};
  const double t = 2.0;
  for (double x : {-5.0, 0.0, 3.0}) {
    const double h = 1e-3;
    auto f = [&](double y) { return superposed_amplitude(s, p, y, t); };
    const Complex dpsi = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    CHECK(std::abs(superposed_gradient(s, p, x, t) - dpsi) <= 1e-9);
    const double j = p.hbar / p.mass * (std::conj(superposed_amplitude(s, p, x, t)) * dpsi).imag() * std::exp(-2.0 * p.gamma * t);
    CHECK(current_density(s, p, x, t) == doctest::Approx(j).epsilon(1e-7));
  }
}

TEST_CASE("continuity at the origin on 100 random probes") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> time(0.01, 10.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> damping(0.0, 0.3);
  std::uniform_real_distribution<double> stretch(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto s = testing::reference_state(angle(rng), 1.9, stretch(rng));
    const CKParams p{damping(rng)};
    const double t = time(rng);
    const double h = 1e-4;
    const double rate = (left_probability(s, p, t + h) - left_probability(s, p, t - h)) / (2.0 * h);
    worst = std::max(worst, std::abs(rate + current_density(s, p, 0.0, t)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("left probability: closed form, erfc form and quadrature agree") {
  for (double gamma : {0.0, 0.3}) {
    for (double eta : {0.0, 1.0}) {
      for (double t : {0.0, 1.0, 5.0, 10.0}) {
        const auto s = testing::reference_state(kPi, 1.9, eta);
        const CKParams p{gamma};
        const double analytic = left_probability(s, p, t);
        CHECK(std::abs(analytic - left_probability(s, p, t, Method::quadrature)) <= 1e-10);
        CHECK(std::abs(analytic - left_probability_erfc_form(s, p, t)) <= 1e-12);
      }
    }
  }
  // off-origin start, overlapping packets
  const SuperposedState s({-4.0, 1.0, 0.5, 0.3}, {-4.0, 0.6, 0.5, 0.3}, 0.8, 2.0);
  const CKParams p{0.1};
  CHECK(std::abs(left_probability(s, p, 2.0) - left_probability(s, p, 2.0, Method::quadrature)) <= 1e-10);
  CHECK(left_probability(testing::reference_state(), CKParams{}, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("negative momentum probability") {
  for (double theta : {0.0, 0.5 * kPi, kPi, 1.5 * kPi}) {
    const auto s = testing::reference_state(theta);
    const double v = negative_momentum_probability(s);
    CHECK(v >= 1e-12);
    CHECK(v <= 1e-8);
    CHECK(v == doctest::Approx(negative_momentum_probability(s, Method::quadrature)).epsilon(1e-9));
    // the same probability from the evolved momentum density at t = 10
    const std::function<double(double)> later = [&](double q) {
      return std::norm(superposed_momentum_amplitude(s, CKParams{}, q, 10.0));
    };
    QuadratureOptions opt;
    opt.abs_tol = 1e-300;
    opt.rel_tol = 1e-13;
    CHECK(std::abs(adaptive_quadrature(later, -INFINITY, 0.0, opt).value - v) <= 1e-12 * v + 1e-22);
  }
  // single packet: (1/2) erfc(p0 / (sqrt 2 sigma_p))
  const SuperposedState single({0.0, 0.1, 0.05, 0.3}, {0.0, 0.2, 0.05, 0.3}, 0.0, 0.0);
  CHECK(negative_momentum_probability(single) == doctest::Approx(0.5 * std::erfc(0.1 / (std::sqrt(2.0) * 0.05))).epsilon(1e-14));
  const SuperposedState close({0.0, 0.1, 0.05, 0.7}, {0.0, 0.05, 0.05, 0.7}, 1.3, 0.4);
  CHECK(negative_momentum_probability(close) ==
        doctest::Approx(negative_momentum_probability(close, Method::quadrature)).epsilon(1e-10));
}

TEST_CASE("probe bundles current and probability") {
  const auto s = testing::reference_state();
  const auto r = probe_backflow(s, CKParams{0.1}, 2.0);
  CHECK(r.time == 2.0);
  CHECK(r.current_at_origin == current_density(s, CKParams{0.1}, 0.0, 2.0));
  CHECK(r.left_probability == left_probability(s, CKParams{0.1}, 2.0));
}

}
