#include "backflow/oracle/propagator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "backflow/errors.hpp"

namespace backflow::oracle {
namespace {

constexpr double kEdgeFraction = 0.1;
constexpr double kEdgeThreshold = 1e-12;

// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place forward/backward transforms on one buffer; the backward transform
// is normalized so that backward(forward(v)) == v.
class FftPair {
 public:
  explicit FftPair(std::vector<Complex>& buffer) : buffer_(buffer) {
    auto* data = reinterpret_cast<fftw_complex*>(buffer_.data());
    const int n = static_cast<int>(buffer_.size());
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_1d(n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;

  void forward() { fftw_execute(forward_); }
  void backward() {
    fftw_execute(backward_);
    const double scale = 1.0 / static_cast<double>(buffer_.size());
    for (auto& v : buffer_) v *= scale;
  }

 private:
  std::vector<Complex>& buffer_;
  fftw_plan forward_;
  fftw_plan backward_;
};

// Angular wavenumbers k in FFT order; p = hbar k.
std::vector<double> wavenumbers(const GridSpec& grid) {
  const std::size_t n = grid.n_points;
  const double dk = 2.0 * std::numbers::pi / (grid.x_max - grid.x_min);
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto signed_index = j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
    k[j] = dk * signed_index;
  }
  return k;
}

void check_edges(const GridWavefunction& psi, double t) {
  const double edge = psi.edge_density();
  if (edge > kEdgeThreshold) {
    std::ostringstream msg;
    msg << "propagate_ck: density " << edge << " near the grid edge at t = " << t
        << " exceeds " << kEdgeThreshold;
    throw EvaluationError(msg.str());
  }
}

// int_a^b e^{rate s} ds
double exp_integral(double rate, double a, double b) {
  if (rate == 0.0) return b - a;
  return std::exp(rate * a) * std::expm1(rate * (b - a)) / rate;
}

}  // namespace

void GridSpec::validate() const {
  if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw DomainError("GridSpec: x_min < x_max required");
  }
  if (n_points < 256 || (n_points & (n_points - 1)) != 0) {
    throw DomainError("GridSpec: n_points must be a power of two >= 256");
  }
  if (!(t_step > 0.0)) throw DomainError("GridSpec: t_step must be positive");
}

double GridWavefunction::norm() const {
  double sum = 0.0;
  for (const auto& v : values) sum += std::norm(v);
  return std::sqrt(sum * grid.dx());
}

double GridWavefunction::l2_distance(const std::function<Complex(double)>& f) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) sum += std::norm(values[j] - f(grid.position(j)));
  return std::sqrt(sum * grid.dx());
}

double GridWavefunction::edge_density() const {
  const auto band = static_cast<std::size_t>(kEdgeFraction * static_cast<double>(values.size()));
  double worst = 0.0;
  for (std::size_t j = 0; j < band; ++j) {
    worst = std::max({worst, std::norm(values[j]), std::norm(values[values.size() - 1 - j])});
  }
  return worst;
}

GridWavefunction sample(const std::function<Complex(double)>& f, const GridSpec& grid) {
  grid.validate();
  GridWavefunction psi{grid, std::vector<Complex>(grid.n_points)};
  for (std::size_t j = 0; j < grid.n_points; ++j) psi.values[j] = f(grid.position(j));
  return psi;
}

MomentumSamples momentum_samples(const GridWavefunction& psi, double hbar) {
  std::vector<Complex> buffer = psi.values;
  FftPair fft(buffer);
  fft.forward();
  const auto k = wavenumbers(psi.grid);
  const double scale = psi.grid.dx() / std::sqrt(2.0 * std::numbers::pi * hbar);
  MomentumSamples out;
  out.momenta.resize(k.size());
  out.amplitudes.resize(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    // the FFT sums from x_min, so shift the phase origin back to x = 0
    out.momenta[j] = hbar * k[j];
    out.amplitudes[j] = scale * std::polar(1.0, -k[j] * psi.grid.x_min) * buffer[j];
  }
  return out;
}

double canonical_momentum_mean(const GridWavefunction& psi, double hbar) {
  const auto m = momentum_samples(psi, hbar);
  double weight = 0.0;
  double moment = 0.0;
  for (std::size_t j = 0; j < m.momenta.size(); ++j) {
    const double density = std::norm(m.amplitudes[j]);
    weight += density;
    moment += density * m.momenta[j];
  }
  return moment / weight;
}

GridWavefunction propagate_ck(const std::function<Complex(double)>& initial, const CKParams& params,
                              const GridSpec& grid, double t_final) {
  params.validate();
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw DomainError("propagate_ck: t_final must be >= 0");
  GridWavefunction psi = sample(initial, grid);
  check_edges(psi, 0.0);
  if (t_final == 0.0) return psi;

  const auto k = wavenumbers(grid);
  const double kinetic_scale = params.hbar / (2.0 * params.mass);
  FftPair fft(psi.values);

  if (params.g == 0.0) {
    const double tau = effective_time(params, t_final);
    fft.forward();
    for (std::size_t j = 0; j < k.size(); ++j) psi.values[j] *= std::polar(1.0, -kinetic_scale * k[j] * k[j] * tau);
    fft.backward();
    check_edges(psi, t_final);
    return psi;
  }

  // V(x) = -m g x, so the potential phase is exp(+i m g x / hbar * int e^{2 gamma s} ds).
  const double rate = 2.0 * params.gamma;
  const double force = params.mass * params.g / params.hbar;
  const auto steps = static_cast<std::size_t>(std::ceil(t_final / grid.t_step - 1e-12));
  const double dt = t_final / static_cast<double>(steps);
  auto potential_kick = [&](double a, double b) {
    const double weight = force * exp_integral(rate, a, b);
    for (std::size_t j = 0; j < psi.values.size(); ++j) psi.values[j] *= std::polar(1.0, weight * grid.position(j));
  };
  for (std::size_t n = 0; n < steps; ++n) {
    const double t0 = dt * static_cast<double>(n);
    const double tm = t0 + 0.5 * dt;
    const double t1 = n + 1 == steps ? t_final : t0 + dt;
    potential_kick(t0, tm);
    const double kinetic = kinetic_scale * exp_integral(-rate, t0, t1);
    fft.forward();
    for (std::size_t j = 0; j < k.size(); ++j) psi.values[j] *= std::polar(1.0, -kinetic * k[j] * k[j]);
    fft.backward();
    potential_kick(tm, t1);
    check_edges(psi, t1);
  }
  return psi;
}

}  // namespace backflow::oracle
