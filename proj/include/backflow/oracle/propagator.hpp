#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "backflow/ck_dynamics.hpp"

namespace backflow::oracle {

/// Uniform periodic grid on [x_min, x_max) used by the split-step propagator.
struct GridSpec {
  double x_min = -400.0;
  double x_max = 400.0;
  std::size_t n_points = std::size_t{1} << 14;
  double t_step = 0.01;  ///< only used when a potential is present

  /// Throws DomainError unless x_min < x_max, n_points >= 256 is a power of two and t_step > 0.
  void validate() const;
  double dx() const { return (x_max - x_min) / static_cast<double>(n_points); }
  double position(std::size_t j) const { return x_min + static_cast<double>(j) * dx(); }
};

struct GridWavefunction {
  GridSpec grid;
  std::vector<Complex> values;

  double norm() const;
  /// sqrt(sum |psi_j - f(x_j)|^2 dx)
  double l2_distance(const std::function<Complex(double)>& f) const;
  /// Largest density within the outer 10% of the grid on either side.
  double edge_density() const;
};

GridWavefunction sample(const std::function<Complex(double)>& f, const GridSpec& grid);

/// Canonical-momentum amplitudes on the FFT momentum grid, in the continuum
/// normalization (2 pi hbar)^{-1/2} int psi(x) e^{-ipx/hbar} dx.
struct MomentumSamples {
  std::vector<double> momenta;
  std::vector<Complex> amplitudes;
};

MomentumSamples momentum_samples(const GridWavefunction& psi, double hbar);

/// <p>, the canonical momentum expectation.
double canonical_momentum_mean(const GridWavefunction& psi, double hbar);

/// Evolves psi(x, 0) = initial(x) under the CK Hamiltonian with V(x) = -m g x.
/// For g = 0 this is a single exact kinetic phase exp(-i p^2 tau / 2 m hbar);
/// otherwise Strang splitting with steps of at most grid.t_step. Throws
/// EvaluationError if the density near the grid edges exceeds 1e-12.
GridWavefunction propagate_ck(const std::function<Complex(double)>& initial, const CKParams& params,
                              const GridSpec& grid, double t_final);

}  // namespace backflow::oracle
