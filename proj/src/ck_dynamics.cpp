#include "backflow/ck_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "backflow/errors.hpp"
#include "backflow/quadrature.hpp"

namespace backflow {
namespace {

constexpr Complex kI{0.0, 1.0};

// Below this |2 gamma t| the closed forms lose digits to cancellation and
// the Taylor series in u = 2 gamma t is used instead.
constexpr double kSeriesThreshold = 0.5;
constexpr int kSeriesTerms = 30;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// (e^{-u} - 1 + u) / u^2
double drift_kernel(double u) {
  if (std::abs(u) < kSeriesThreshold) {
    double sum = 0.0;
    double power = 1.0;
    for (int k = 0; k < kSeriesTerms; ++k) {
      sum += power / factorial(k + 2);
      power *= -u;
    }
    return sum;
  }
  return (std::expm1(-u) + u) / (u * u);
}

// 2 (cosh u - 1) / u^2
double cosh_kernel(double u) {
  if (std::abs(u) < kSeriesThreshold) {
    double sum = 0.0;
    double power = 1.0;
    for (int k = 0; k < kSeriesTerms / 2; ++k) {
      sum += 2.0 * power / factorial(2 * k + 2);
      power *= u * u;
    }
    return sum;
  }
  const double sh = std::sinh(0.5 * u);
  return 4.0 * sh * sh / (u * u);
}

// (4 + (2u - 3) e^u - e^{-u}) / (2 u^3)
double action_kernel(double u) {
  if (std::abs(u) < kSeriesThreshold) {
    // numerator coefficients c_k = 2/(k-1)! - 3/k! - (-1)^k/k!, zero for k < 3
    double sum = 0.0;
    double power = 1.0;
    for (int k = 3; k < kSeriesTerms + 3; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const double c = 2.0 / factorial(k - 1) - 3.0 / factorial(k) - sign / factorial(k);
      sum += c * power;
      power *= u;
    }
    return 0.5 * sum;
  }
  return (4.0 + (2.0 * u - 3.0) * std::exp(u) - std::exp(-u)) / (2.0 * u * u * u);
}

// (e^{u} - 1) / (2 gamma), i.e. e^{2 gamma t} tau(t); equals t at gamma = 0
double growth_time(const CKParams& params, double t) {
  if (params.gamma == 0.0) return t;
  return std::expm1(2.0 * params.gamma * t) / (2.0 * params.gamma);
}

void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError("time must be finite and nonnegative, got " + std::to_string(t));
  }
}

void require_free(const CKParams& params, const char* what) {
  if (params.g != 0.0) {
    throw UnsupportedConfiguration(std::string(what) +
                                   ": position-space closed form requires g = 0");
  }
}

}  // namespace

void CKParams::validate() const {
  if (!std::isfinite(gamma) || !std::isfinite(g) || !std::isfinite(mass) || !std::isfinite(hbar)) {
    throw DomainError("CKParams: all fields must be finite");
  }
  if (!(mass > 0.0)) throw DomainError("CKParams: mass must be positive");
  if (!(hbar > 0.0)) throw DomainError("CKParams: hbar must be positive");
  if (gamma < 0.0) throw DomainError("CKParams: gamma must be nonnegative");
}

void GaussianPacket::validate() const {
  if (!std::isfinite(x0) || !std::isfinite(p0) || !std::isfinite(sigma_p) || !std::isfinite(eta)) {
    throw DomainError("GaussianPacket: all fields must be finite");
  }
  if (!(sigma_p > 0.0)) throw DomainError("GaussianPacket: sigma_p must be positive");
}

double GaussianPacket::position_width(double hbar) const {
  return sigma0(hbar) * std::sqrt(1.0 + eta * eta);
}

double effective_time(const CKParams& params, double t) {
  check_time(t);
  if (params.gamma == 0.0) return t;
  return -std::expm1(-2.0 * params.gamma * t) / (2.0 * params.gamma);
}

EvolutionCoefficients evolution_coefficients(const GaussianPacket& packet, const CKParams& params,
                                             double t) {
  params.validate();
  packet.validate();
  const double tau = effective_time(params, t);
  const double m = params.mass;
  const double hbar = params.hbar;
  const double sp = packet.sigma_p;
  const double u = 2.0 * params.gamma * t;

  EvolutionCoefficients c{};
  c.tau = tau;
  c.s_t = (hbar / (2.0 * sp)) * Complex{1.0, 2.0 * sp * sp * tau / (m * hbar) + packet.eta};
  c.x_t = packet.x0 + packet.p0 * tau / m + params.g * t * t * drift_kernel(u);
  c.p_t = packet.p0 * std::exp(-u) + m * params.g * tau;
  c.action = packet.p0 * packet.p0 * tau / (2.0 * m);
  if (params.g != 0.0) {
    c.action += params.g * (packet.p0 * t * t * cosh_kernel(u) + m * packet.x0 * growth_time(params, t));
    c.action += m * params.g * params.g * t * t * t * action_kernel(u);
  }
  return c;
}

Complex packet_amplitude(const GaussianPacket& packet, const CKParams& params, double x, double t) {
  require_free(params, "packet_amplitude");
  const auto c = evolution_coefficients(packet, params, t);
  const double hbar = params.hbar;
  const double dx = x - c.x_t;
  const Complex exponent = -packet.sigma_p * dx * dx / (2.0 * hbar * c.s_t) +
                           kI * (packet.p0 * dx / hbar + c.action / hbar);
  return std::pow(2.0 * std::numbers::pi, -0.25) / std::sqrt(c.s_t) * std::exp(exponent);
}

GaussianTerm packet_term(const GaussianPacket& packet, const CKParams& params, double t) {
  require_free(params, "packet_term");
  const auto c = evolution_coefficients(packet, params, t);
  const double hbar = params.hbar;
  const Complex q = packet.sigma_p / (2.0 * hbar * c.s_t);
  const double k = packet.p0 / hbar;
  GaussianTerm term;
  term.quadratic = q;
  term.linear = 2.0 * q * c.x_t + kI * k;
  term.log_amplitude = -q * c.x_t * c.x_t + kI * (c.action / hbar - k * c.x_t) -
                       0.25 * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(c.s_t);
  return term;
}

Complex momentum_amplitude(const GaussianPacket& packet, const CKParams& params, double p, double t) {
  const auto c = evolution_coefficients(packet, params, t);
  const double hbar = params.hbar;
  const double sp = packet.sigma_p;
  // p_t e^{2 gamma t} = p0 + m g e^{2 gamma t} tau(t)
  const double center = packet.p0 + params.mass * params.g * growth_time(params, t);
  const double dp = p - center;
  const Complex exponent = -c.s_t * dp * dp / (2.0 * hbar * sp) - kI * (p * c.x_t / hbar) +
                           kI * (c.action / hbar);
  return std::pow(2.0 * std::numbers::pi * sp * sp, -0.25) * std::exp(exponent);
}

GaussianTerm momentum_term(const GaussianPacket& packet, const CKParams& params, double t) {
  require_free(params, "momentum_term");
  packet.validate();
  const double tau = effective_time(params, t);
  const double sp2 = packet.sigma_p * packet.sigma_p;
  const Complex width = Complex{1.0, packet.eta} / (4.0 * sp2);
  GaussianTerm term;
  term.quadratic = width + kI * (tau / (2.0 * params.mass * params.hbar));
  term.linear = 2.0 * width * packet.p0 - kI * (packet.x0 / params.hbar);
  term.log_amplitude = -width * packet.p0 * packet.p0 - 0.25 * std::log(2.0 * std::numbers::pi * sp2);
  return term;
}

double physical_momentum_distribution(const GaussianPacket& packet, const CKParams& params,
                                      double momentum, double t) {
  const auto c = evolution_coefficients(packet, params, t);
  const double width = packet.sigma_p * std::exp(-2.0 * params.gamma * t);
  const double z = (momentum - c.p_t) / width;
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * width);
}

double linear_potential_negative_momentum_probability(const GaussianPacket& packet,
                                                      const CKParams& params, double t) {
  params.validate();
  packet.validate();
  check_time(t);
  if (params.g < 0.0) throw DomainError("linear potential probability requires g >= 0");
  const double scale = std::sqrt(2.0) * packet.sigma_p;
  const double arg = packet.p0 / scale + params.mass * params.g / scale * growth_time(params, t);
  return scaled_erfc(std::log(0.5), Complex{arg, 0.0}).real();
}

SuperposedState::SuperposedState(GaussianPacket packet_a, GaussianPacket packet_b, double alpha,
                                 double theta)
    : packet_a_(packet_a), packet_b_(packet_b), alpha_(alpha), theta_(theta) {
  packet_a_.validate();
  packet_b_.validate();
  if (!std::isfinite(alpha) || !std::isfinite(theta)) {
    throw DomainError("SuperposedState: alpha and theta must be finite");
  }
  if (packet_a_.sigma_p != packet_b_.sigma_p || packet_a_.eta != packet_b_.eta ||
      packet_a_.x0 != packet_b_.x0) {
    throw UnsupportedConfiguration(
        "SuperposedState: packets must share x0, sigma_p and eta");
  }
  const double norm_sq = 1.0 + alpha * alpha + 2.0 * alpha * std::cos(theta) * packet_overlap();
  if (!(norm_sq > 0.0)) throw DomainError("SuperposedState: superposition has zero norm");
  norm_ = 1.0 / std::sqrt(norm_sq);
}

Complex SuperposedState::coefficient_b() const {
  return norm_ * alpha_ * std::polar(1.0, theta_);
}

double SuperposedState::packet_overlap() const {
  const double dp = packet_a_.p0 - packet_b_.p0;
  const double eta = packet_a_.eta;
  const double sp = packet_a_.sigma_p;
  return std::exp(-dp * dp * (1.0 + eta * eta) / (8.0 * sp * sp));
}

Complex superposed_amplitude(const SuperposedState& state, const CKParams& params, double x, double t) {
  return state.coefficient_a() * packet_amplitude(state.packet_a(), params, x, t) +
         state.coefficient_b() * packet_amplitude(state.packet_b(), params, x, t);
}

Complex superposed_gradient(const SuperposedState& state, const CKParams& params, double x, double t) {
  auto gradient = [&](const GaussianPacket& packet) {
    const auto c = evolution_coefficients(packet, params, t);
    const double hbar = params.hbar;
    const Complex factor = -packet.sigma_p * (x - c.x_t) / (hbar * c.s_t) + kI * (packet.p0 / hbar);
    return factor * packet_amplitude(packet, params, x, t);
  };
  return state.coefficient_a() * gradient(state.packet_a()) +
         state.coefficient_b() * gradient(state.packet_b());
}

Complex superposed_momentum_amplitude(const SuperposedState& state, const CKParams& params,
                                      double p, double t) {
  return state.coefficient_a() * momentum_amplitude(state.packet_a(), params, p, t) +
         state.coefficient_b() * momentum_amplitude(state.packet_b(), params, p, t);
}

double current_density(const SuperposedState& state, const CKParams& params, double x, double t) {
  const Complex psi = superposed_amplitude(state, params, x, t);
  const Complex dpsi = superposed_gradient(state, params, x, t);
  return params.hbar / params.mass * (std::conj(psi) * dpsi).imag() *
         std::exp(-2.0 * params.gamma * t);
}

double left_probability(const SuperposedState& state, const CKParams& params, double t, Method method) {
  require_free(params, "left_probability");
  check_time(t);
  if (method == Method::quadrature) {
    const std::function<double(double)> density = [&](double x) {
      return std::norm(superposed_amplitude(state, params, x, t));
    };
    QuadratureOptions options;
    options.abs_tol = 1e-13;
    return adaptive_quadrature(density, -std::numeric_limits<double>::infinity(), 0.0, options).value;
  }
  const auto ga = packet_term(state.packet_a(), params, t);
  const auto gb = packet_term(state.packet_b(), params, t);
  const Complex ca = state.coefficient_a();
  const Complex cb = state.coefficient_b();
  const double aa = half_line_gaussian_overlap(ga, ga, HalfLine::negative).real();
  const double bb = half_line_gaussian_overlap(gb, gb, HalfLine::negative).real();
  const Complex ab = half_line_gaussian_overlap(ga, gb, HalfLine::negative);
  const double p = std::norm(ca) * aa + std::norm(cb) * bb + 2.0 * (std::conj(ca) * cb * ab).real();
  return std::clamp(p, 0.0, 1.0);
}

double negative_momentum_probability(const SuperposedState& state, Method method) {
  if (method == Method::quadrature) {
    const CKParams free_params;
    const std::function<double(double)> density = [&](double p) {
      return std::norm(superposed_momentum_amplitude(state, free_params, p, 0.0));
    };
    QuadratureOptions options;
    options.abs_tol = 1e-300;
    options.rel_tol = 1e-12;
    return adaptive_quadrature(density, -std::numeric_limits<double>::infinity(), 0.0, options).value;
  }
  const double sp = state.packet_a().sigma_p;
  const double eta = state.packet_a().eta;
  const double pa = state.packet_a().p0;
  const double pb = state.packet_b().p0;
  const double alpha = state.alpha();
  const double root2sp = std::sqrt(2.0) * sp;
  const double direct = scaled_erfc(0.0, Complex{pa / root2sp, 0.0}).real() +
                        alpha * alpha * scaled_erfc(0.0, Complex{pb / root2sp, 0.0}).real();
  const double dp = pa - pb;
  const Complex log_prefactor{-dp * dp * (1.0 + eta * eta) / (8.0 * sp * sp), state.theta()};
  const Complex arg = Complex{pa + pb, -eta * dp} / (2.0 * root2sp);
  const double cross = 2.0 * alpha * scaled_erfc(log_prefactor, arg).real();
  const double n = state.norm();
  return std::clamp(0.5 * n * n * (direct + cross), 0.0, 1.0);
}

BackflowProbeResult probe_backflow(const SuperposedState& state, const CKParams& params, double t) {
  return {t, current_density(state, params, 0.0, t), left_probability(state, params, t)};
}

}  // namespace backflow
