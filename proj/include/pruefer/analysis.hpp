#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pruefer/error.hpp"
#include "pruefer/integrate.hpp"
#include "pruefer/oracle.hpp"

namespace pruefer {

struct FitWindow {
  double lo = 1e3;
  double hi = 1e6;
};

/// Least-squares line logR = slope * ln x + intercept over a window.
/// exponent() is the decay exponent p in R ~ x^(-p).
struct DecayFit {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t sample_count = 0;

  [[nodiscard]] double exponent() const { return -slope; }
};

inline constexpr std::size_t kMinFitSamples = 50;

[[nodiscard]] inline DecayFit fit_log_log(std::span<const double> xs, std::span<const double> log_r,
                                          FitWindow window) {
  if (xs.size() != log_r.size()) throw DomainError("fit_decay: x and logR lengths differ");
  if (!(window.lo >= 1.0)) throw DomainError("fit_decay: window must start at x >= 1");
  if (!(window.hi >= 10.0 * window.lo)) throw DomainError("fit_decay: degenerate window (less than one decade)");

  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] >= window.lo && xs[i] <= window.hi) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(log_r[i]);
    }
  }
  if (lx.size() < kMinFitSamples) {
    throw DomainError("fit_decay: " + std::to_string(lx.size()) + " samples in window, need " +
                      std::to_string(kMinFitSamples));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_decay: degenerate window (all samples at one x)");

  DecayFit fit;
  fit.x_lo = window.lo;
  fit.x_hi = window.hi;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  fit.sample_count = lx.size();
  return fit;
}

[[nodiscard]] inline DecayFit fit_decay(const Trajectory& traj, FitWindow window) {
  if (window.hi > traj.x_reached * (1.0 + 1e-12)) {
    throw DomainError("fit_decay: window extends beyond the trajectory");
  }
  std::vector<double> xs;
  std::vector<double> ls;
  xs.reserve(traj.samples.size());
  ls.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    xs.push_back(s.x);
    ls.push_back(s.log_r);
  }
  return fit_log_log(xs, ls, window);
}

struct QuadratureValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

/// Integral of |sin 2theta(y)|/(1+y) over [x0, x1] inside one bracket
/// [l, r], with theta rebuilt by cubic Hermite interpolation from the node
/// angles and slopes theta' = k - (V/k) sin^2 theta.
[[nodiscard]] inline double bracket_integral(const TrajectoryNode& l, const TrajectoryNode& r, double k, double x0,
                                             double x1) {
  static constexpr double nodes[] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                     -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                     0.7966664774136267,  0.9602898564975363};
  static constexpr double weights[] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                       0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                       0.2223810344533745, 0.1012285362903763};
  const double h = r.x - l.x;
  const auto slope = [k](const TrajectoryNode& n) {
    const double s = std::sin(n.theta);
    return k - n.potential / k * s * s;
  };
  const double dl = slope(l) * h;
  const double dr = slope(r) * h;
  const auto theta = [&](double y) {
    const double t = (y - l.x) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * l.theta + (t3 - 2 * t2 + t) * dl + (-2 * t3 + 3 * t2) * r.theta +
           (t3 - t2) * dr;
  };
  const double mid = 0.5 * (x0 + x1);
  const double half = 0.5 * (x1 - x0);
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double y = mid + half * nodes[i];
    sum += weights[i] * std::abs(std::sin(2.0 * theta(y))) / (1.0 + y);
  }
  return sum * half;
}

/// Running weighted integral at x: exact at nodes (crossings and samples);
/// in between it is continued from the left node and, independently, back
/// from the right node, and the two disagree by the reported error.
[[nodiscard]] inline QuadratureValue weighted_at(const Trajectory& traj, double x) {
  const TrajectoryNode* left = nullptr;
  const TrajectoryNode* right = nullptr;
  const auto consider = [&](const std::vector<TrajectoryNode>& nodes) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), x,
                                     [](const TrajectoryNode& n, double v) { return n.x < v; });
    if (it != nodes.end() && (!right || it->x < right->x)) right = &*it;
    const TrajectoryNode* below = nullptr;
    if (it != nodes.end() && it->x == x) {
      below = &*it;
    } else if (it != nodes.begin()) {
      below = &*(it - 1);
    }
    if (below && (!left || below->x > left->x)) left = below;
  };
  consider(traj.samples);
  consider(traj.crossings);
  if (!left || !right) throw DomainError("weighted_sin_integral: x outside the trajectory");
  if (left->x == x) return {left->weighted_sin, 0.0};
  if (right->x == x) return {right->weighted_sin, 0.0};
  // within a quarter turn theta is smooth and monotone enough to interpolate;
  // a wider gap would alias the oscillation
  if (right->x - left->x > 1.05 * std::numbers::pi / (2.0 * traj.config.k) + 1e-9) {
    throw DomainError("weighted_sin_integral: nodes too sparse for the oscillation scale near x = " +
                      std::to_string(x));
  }
  const double k = traj.config.k;
  const double from_left = left->weighted_sin + bracket_integral(*left, *right, k, left->x, x);
  const double from_right = right->weighted_sin - bracket_integral(*left, *right, k, x, right->x);
  return {0.5 * (from_left + from_right), std::abs(from_left - from_right)};
}

}  // namespace detail

/// Integral of |sin 2theta(y)|/(1+y) over [x0, x]. The integrator carries the
/// running integral as a state, so it is exact (to integrator tolerance) at
/// crossings and samples; between nodes it is completed by quadrature on the
/// interpolated angle.
[[nodiscard]] inline QuadratureValue weighted_sin_integral(const Trajectory& traj, double x0, double x) {
  if (!(x0 >= 1.0)) throw DomainError("weighted_sin_integral: x0 must be >= 1");
  if (!(x >= x0)) throw DomainError("weighted_sin_integral: need x >= x0");
  if (x > traj.x_reached) throw DomainError("weighted_sin_integral: x beyond the trajectory");
  const auto hi = detail::weighted_at(traj, x);
  const auto lo = detail::weighted_at(traj, x0);
  const double tol = traj.config.rel_tol * std::abs(hi.value) + traj.config.abs_tol;
  return {hi.value - lo.value, hi.error_estimate + lo.error_estimate + tol};
}

struct PeriodIntegral {
  std::size_t index = 0;
  double value = 0.0;
  /// value - 1/k
  double deviation = 0.0;
};

/// Integral of |sin 2theta| over [x_i, x_{i+1}] between consecutive crossings.
[[nodiscard]] inline PeriodIntegral per_period_integral(const Trajectory& traj, std::size_t i) {
  if (i < 1 || i + 1 > traj.crossings.size()) {
    throw DomainError("per_period_integral: crossings " + std::to_string(i) + " and " + std::to_string(i + 1) +
                      " not both present");
  }
  const double value = traj.crossings[i].abs_sin - traj.crossings[i - 1].abs_sin;
  return {i, value, value - 1.0 / traj.config.k};
}

/// Largest possible eigenvalue for an envelope amplitude a: 4 a^2 / pi^2.
[[nodiscard]] inline double max_eigenvalue_bound(double a) {
  if (!(a >= 0.0)) throw DomainError("max_eigenvalue_bound: amplitude must be >= 0");
  return 4.0 * a * a / (std::numbers::pi * std::numbers::pi);
}

enum class Verdict { embedded_eigenvalue, not_eigenvalue, inconclusive };

[[nodiscard]] inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::embedded_eigenvalue: return "embedded_eigenvalue";
    case Verdict::not_eigenvalue: return "not_eigenvalue";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct EigenvalueVerdict {
  double a = 0.0;
  double k = 0.0;
  double lambda = 0.0;
  double threshold = 0.0;
  double predicted_exponent = 0.0;
  DecayFit fit;
  double tail_l2 = 0.0;
  Verdict verdict = Verdict::inconclusive;
  /// (p - 1/2) in units of the exponent resolution rms / ln(x_hi/x_lo).
  double margin = 0.0;
  /// The |p - 1/2| a decision required.
  double margin_floor = 0.0;
  std::string diagnostic;

  [[nodiscard]] double fitted_exponent() const { return fit.exponent(); }
};

struct VerdictOptions {
  double min_margin = 0.02;
  double residual_factor = 3.0;
};

/// Default decay-fit window: [10^3, x_end], pulled down so it spans at least
/// two decades when the trajectory is shorter.
[[nodiscard]] inline FitWindow default_fit_window(double x_end) {
  if (x_end < 100.0) throw DomainError("verdict: trajectory shorter than a two-decade fit window");
  return {std::min(1e3, x_end / 100.0), x_end};
}

/// The exponent rule: R ~ x^(-p) is square integrable iff p > 1/2. A positive
/// verdict above the 4a^2/pi^2 bound is refused as inconclusive.
[[nodiscard]] inline EigenvalueVerdict verdict(const Trajectory& traj, double a, double k,
                                               const VerdictOptions& options = {}) {
  if (traj.truncated()) throw NumericalError("verdict: truncated trajectory (" + traj.message + ")");
  if (!(a >= 0.0) || !(k > 0.0)) throw DomainError("verdict: need a >= 0 and k > 0");

  EigenvalueVerdict v;
  v.a = a;
  v.k = k;
  v.lambda = k * k;
  v.threshold = max_eigenvalue_bound(a);
  v.predicted_exponent = a / (k * std::numbers::pi);
  v.fit = fit_decay(traj, default_fit_window(traj.x_reached));
  v.tail_l2 = l2_norm_tail(traj, v.fit.x_lo);

  const double p = v.fit.exponent();
  const double resolution =
      std::max(v.fit.residual_rms / std::log(v.fit.x_hi / v.fit.x_lo), std::numeric_limits<double>::epsilon());
  v.margin_floor = std::max(options.min_margin, options.residual_factor * resolution);
  v.margin = (p - 0.5) / resolution;

  if (p > 0.5 + v.margin_floor) {
    if (v.lambda >= v.threshold) {
      v.verdict = Verdict::inconclusive;
      v.diagnostic = "decay exponent above 1/2 but lambda >= 4a^2/pi^2, where no eigenvalue can exist";
    } else {
      v.verdict = Verdict::embedded_eigenvalue;
    }
  } else if (p < 0.5 - v.margin_floor) {
    v.verdict = Verdict::not_eigenvalue;
  } else {
    v.verdict = Verdict::inconclusive;
    v.diagnostic = "decay exponent within the margin floor of 1/2";
  }
  return v;
}

/// Where a (k, fitted exponent) curve crosses 1/2, interpolated linearly in
/// 1/k (the predicted exponent a/(k pi) is exactly linear in 1/k).
[[nodiscard]] inline std::optional<double> flip_k(std::vector<std::pair<double, double>> curve) {
  std::sort(curve.begin(), curve.end());
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const auto [k0, p0] = curve[i];
    const auto [k1, p1] = curve[i + 1];
    if ((p0 - 0.5) * (p1 - 0.5) > 0.0 || p0 == p1) continue;
    const double t = (0.5 - p0) / (p1 - p0);
    return 1.0 / (1.0 / k0 + t * (1.0 / k1 - 1.0 / k0));
  }
  return std::nullopt;
}

/// g(x) = logR(x) + (a/(k pi)) ln x over the samples in [x_lo, x_end].
struct EnvelopeCheck {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// slope of g against ln x (a residual trend means the exponent is off)
  double trend = 0.0;
  double limit = 0.0;
  bool bounded = false;

  [[nodiscard]] double range() const { return max - min; }
};

[[nodiscard]] inline EnvelopeCheck lower_envelope_check(const Trajectory& traj, double a, double k,
                                                        double x_lo = 100.0, double limit = 1.0) {
  if (traj.truncated()) throw NumericalError("lower_envelope_check: truncated trajectory (" + traj.message + ")");
  if (!(x_lo >= 1.0) || traj.x_reached < 1000.0 * x_lo * (1.0 - 1e-12)) {
    throw DomainError("lower_envelope_check: need at least three decades above x_lo");
  }
  const double c = a / (k * std::numbers::pi);
  EnvelopeCheck out;
  out.x_lo = x_lo;
  out.x_hi = traj.x_reached;
  out.limit = limit;
  out.min = INFINITY;
  out.max = -INFINITY;
  std::vector<double> lx;
  std::vector<double> gs;
  for (const auto& s : traj.samples) {
    if (s.x < x_lo) continue;
    const double g = s.log_r + c * std::log(s.x);
    out.min = std::min(out.min, g);
    out.max = std::max(out.max, g);
    lx.push_back(std::log(s.x));
    gs.push_back(g);
  }
  if (lx.size() < 2) throw DomainError("lower_envelope_check: too few samples");
  double mx = 0.0;
  double mg = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    mg += gs[i];
  }
  mx /= static_cast<double>(lx.size());
  mg /= static_cast<double>(lx.size());
  double sxx = 0.0;
  double sxg = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxg += (lx[i] - mx) * (gs[i] - mg);
  }
  out.trend = sxg / sxx;
  out.bounded = out.range() <= limit;
  return out;
}

}  // namespace pruefer
