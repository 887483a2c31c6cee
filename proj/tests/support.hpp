#pragma once

#include <numbers>

#include "backflow/ck_dynamics.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

// Packet parameters used throughout: sigma_p = 0.05, x0 = 0, kicks 1.4 and 0.3.
inline backflow::GaussianPacket fast_packet(double eta = 0.0) { return {0.0, 1.4, 0.05, eta}; }
inline backflow::GaussianPacket slow_packet(double eta = 0.0) { return {0.0, 0.3, 0.05, eta}; }

inline backflow::SuperposedState reference_state(double theta = kPi, double alpha = 1.9, double eta = 0.0) {
  return {fast_packet(eta), slow_packet(eta), alpha, theta};
}

}  // namespace testing
