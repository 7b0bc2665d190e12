#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "pruefer/error.hpp"

namespace pruefer {

/// Point on a solution in modified Pruefer coordinates:
///   u = R sin(theta),  u' = k R cos(theta).
/// theta is unwrapped (never reduced mod 2 pi); the amplitude is kept as log R.
struct PrueferState {
  double x = 0.0;
  double theta = 0.0;
  double log_r = 0.0;
};

struct PrueferDerivative {
  double dtheta = 0.0;
  double dlog_r = 0.0;
};

/// Right-hand side of the Pruefer system for -u'' + V u = k^2 u:
///   theta'  = k - (V/k) sin^2 theta
///   logR'   = (V/(2k)) sin 2theta
[[nodiscard]] inline PrueferDerivative pruefer_rhs(double theta, double potential, double k) {
  const double s = std::sin(theta);
  return {k - (potential / k) * s * s, (potential / (2.0 * k)) * std::sin(2.0 * theta)};
}

struct Wavefunction {
  double u = 0.0;
  double u_prime = 0.0;
};

[[nodiscard]] inline Wavefunction to_wavefunction(const PrueferState& state, double k) {
  if (!(k > 0.0)) throw DomainError("to_wavefunction: k must be > 0");
  if (state.log_r > std::log(std::numeric_limits<double>::max())) {
    throw NumericalError("to_wavefunction: exp(logR) overflows at x = " + std::to_string(state.x));
  }
  const double r = std::exp(state.log_r);
  return {r * std::sin(state.theta), k * r * std::cos(state.theta)};
}

struct AngleAmplitude {
  double theta = 0.0;
  double log_r = 0.0;
};

/// Inverse change of variables. Picks the branch of theta closest to `theta_hint`.
[[nodiscard]] inline AngleAmplitude from_wavefunction(double u, double u_prime, double k,
                                                      double theta_hint) {
  if (!(k > 0.0)) throw DomainError("from_wavefunction: k must be > 0");
  const double c = u_prime / k;
  if (u == 0.0 && c == 0.0) throw DomainError("from_wavefunction: (u, u') = (0, 0) is not a nontrivial solution");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double base = std::atan2(u, c);
  const double theta = base + two_pi * std::round((theta_hint - base) / two_pi);
  // hypot keeps the log finite when u or u'/k alone would overflow when squared
  return {theta, std::log(std::hypot(u, c))};
}

}  // namespace pruefer
