#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pruefer/dormand_prince.hpp"
#include "pruefer/error.hpp"
#include "pruefer/potential.hpp"
#include "pruefer/pruefer.hpp"

namespace pruefer {

inline constexpr double half_pi = std::numbers::pi / 2.0;

struct IntegratorConfig {
  double k = 1.0;
  double theta0 = std::numbers::pi / 4.0;
  double x_end = 100.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Step cap as a fraction of the half-period pi/(2k) of sin 2theta.
  double max_step_fraction = 0.1;
  /// Switch points are localized until |sin 2theta| is below this (or to rounding).
  double event_tol = 1e-12;
  /// Log-spaced samples on [1, x_end].
  std::size_t samples = 1000;
  /// Linear samples on [0, 1).
  std::size_t prefix_samples = 20;

  void validate() const {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("integrator: k must be finite and > 0");
    if (!std::isfinite(theta0)) throw DomainError("integrator: theta0 must be finite");
    if (!(x_end > 0.0) || !std::isfinite(x_end)) throw DomainError("integrator: x_end must be finite and > 0");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("integrator: tolerances must be > 0");
    if (!(max_step_fraction > 0.0 && max_step_fraction <= 0.5)) {
      throw DomainError("integrator: max_step_fraction must lie in (0, 1/2]");
    }
    if (!(event_tol > 0.0)) throw DomainError("integrator: event_tol must be > 0");
    if (samples < 2) throw DomainError("integrator: need at least 2 samples");
  }

  [[nodiscard]] double max_step() const { return max_step_fraction * std::numbers::pi / (2.0 * k); }
};

/// State at one abscissa. weighted_sin and abs_sin are the running integrals
/// of |sin 2theta|/(1+y) and |sin 2theta| from 0 to x.
struct TrajectoryNode {
  double x = 0.0;
  double theta = 0.0;
  double log_r = 0.0;
  double potential = 0.0;
  double weighted_sin = 0.0;
  double abs_sin = 0.0;
};

enum class EventKind { sign_switch, crossing, slide_begin, slide_end };

[[nodiscard]] inline const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::sign_switch: return "sign_switch";
    case EventKind::crossing: return "crossing";
    case EventKind::slide_begin: return "slide_begin";
    case EventKind::slide_end: return "slide_end";
  }
  return "unknown";
}

struct TrajectoryEvent {
  EventKind kind = EventKind::sign_switch;
  TrajectoryNode node;
};

enum class Termination { completed, truncated };

struct Trajectory {
  PotentialSpec potential;
  IntegratorConfig config;
  std::vector<TrajectoryNode> samples;
  /// sign_switch / slide_begin / slide_end, in order of x. Feedback only.
  std::vector<TrajectoryEvent> switches;
  /// crossings[i-1] is the first point where theta reaches crossing_level(i).
  std::vector<TrajectoryNode> crossings;
  /// Quarter-turn index of the cell holding theta0; crossing i sits at level
  /// (crossing_base + i) * pi/2.
  std::int64_t crossing_base = 0;
  Termination status = Termination::completed;
  std::string message;
  double x_reached = 0.0;

  [[nodiscard]] bool truncated() const { return status == Termination::truncated; }

  [[nodiscard]] double crossing_level(std::size_t i) const {
    return static_cast<double>(crossing_base + static_cast<std::int64_t>(i)) * half_pi;
  }
};

/// Output abscissae: a linear prefix on [0, 1) and log-spaced points on [1, x_end].
[[nodiscard]] inline std::vector<double> sample_grid(const IntegratorConfig& cfg) {
  std::vector<double> xs;
  if (cfg.x_end <= 1.0) {
    const std::size_t n = std::max<std::size_t>(cfg.prefix_samples + cfg.samples, 2);
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(cfg.x_end * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return xs;
  }
  for (std::size_t i = 0; i < cfg.prefix_samples; ++i) {
    xs.push_back(static_cast<double>(i) / static_cast<double>(cfg.prefix_samples));
  }
  const double span = std::log(cfg.x_end);
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    xs.push_back(std::exp(span * static_cast<double>(i) / static_cast<double>(cfg.samples - 1)));
  }
  xs[cfg.prefix_samples] = 1.0;
  xs.back() = cfg.x_end;
  return xs;
}

namespace detail {

/// Adaptive integration of (theta, logR, weighted_sin, abs_sin). Steps are cut
/// wherever theta meets a multiple of pi/2, so within a step sin 2theta has a
/// fixed sign: the quadrature integrands stay smooth and, for the feedback
/// potential, the sign of V is constant on every step.
class PrueferIntegrator {
 public:
  using Stepper = DormandPrince<4>;
  using State = Stepper::State;

  PrueferIntegrator(const PotentialSpec& spec, const IntegratorConfig& cfg)
      : spec_(spec), cfg_(cfg), table_(spec.table()) {
    cfg_.validate();
    if (table_ && (table_->x_min() > 0.0 || table_->x_max() < cfg_.x_end)) {
      throw DomainError("integrate: table domain [" + std::to_string(table_->x_min()) + ", " +
                        std::to_string(table_->x_max()) + "] does not cover [0, " +
                        std::to_string(cfg_.x_end) + "]");
    }
    if (const auto* fb = std::get_if<FeedbackSign>(&spec_.variant())) feedback_amplitude_ = fb->amplitude;
  }

  Trajectory run() {
    Trajectory traj;
    traj.potential = spec_;
    traj.config = cfg_;
    sample_x_ = sample_grid(cfg_);
    traj.samples.reserve(sample_x_.size());

    cell_ = static_cast<std::int64_t>(std::floor(cfg_.theta0 / half_pi));
    traj.crossing_base = cell_;
    max_quarter_ = cell_;
    double x = 0.0;
    State y{cfg_.theta0, 0.0, 0.0, 0.0};

    if (feedback() && quarter_level(cell_) == cfg_.theta0 && is_odd(cell_) && slides_at(x)) {
      begin_slide(traj, x, y);
    }
    emit_samples_constant(traj, x, y);

    const double hmax = cfg_.max_step();
    double h = std::min(hmax, 0.01 * hmax + 1e-3);
    State f0 = rhs(x, y);

    while (x < cfg_.x_end) {
      if (sliding_) {
        const double x_next = std::min(slide_exit_, cfg_.x_end);
        emit_samples_constant(traj, x_next, y);
        x = x_next;
        if (x >= slide_exit_) {
          sliding_ = false;
          // leaves the odd boundary upward into the cell where V > 0
          cell_ = std::llround(y[0] / half_pi);
          push_switch(traj, EventKind::slide_end, x, y);
          f0 = rhs(x, y);
        }
        continue;
      }

      double x1 = x + std::min(h, hmax);
      if (x1 >= cfg_.x_end) x1 = cfg_.x_end;
      if (table_) {
        const std::size_t cell = table_->locate(x, table_cell_);
        if (cell != table_cell_) {
          table_cell_ = cell;
          f0 = rhs(x, y);
        }
        const double node = table_->grid()[std::min(table_cell_ + 1, table_->grid().size() - 1)];
        if (node > x && x1 > node) x1 = node;
      }
      const double step_h = x1 - x;
      auto step = stepper_.attempt([this](double xs, const State& ys) { return rhs(xs, ys); }, x, y, f0, step_h);
      const double err = error_norm(step);

      if (!std::isfinite(err) || err > 1.0) {
        h = step_h * (std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2);
        if (h < 1e-14 * std::max(1.0, std::abs(x))) {
          return truncate(traj, x, "step size underflow at x = " + format_x(x));
        }
        continue;
      }

      const double lower = quarter_level(cell_);
      const double upper = quarter_level(cell_ + 1);
      const double theta1 = step.y1[0];
      const bool up = theta1 >= upper;
      const bool down = !up && theta1 < lower - cfg_.event_tol;

      if (up || down) {
        const double boundary = up ? upper : lower;
        const double xe = locate_level(step, boundary);
        if (xe > x) {
          step = stepper_.attempt([this](double xs, const State& ys) { return rhs(xs, ys); }, x, y, f0, xe - x);
        } else {
          step.h = 0.0;
          step.y1 = y;
        }
        step.y1[0] = boundary;
        emit_samples(traj, step, xe);
        x = xe;
        y = step.y1;
        cross_boundary(traj, x, y, up);
        f0 = rhs(x, y);
        if (!finite_state(y)) return truncate(traj, x, "non-finite state at x = " + format_x(x));
        continue;
      }

      emit_samples(traj, step, x1);
      x = x1;
      y = step.y1;
      f0 = step.f1;
      if (!finite_state(y)) return truncate(traj, x, "non-finite state at x = " + format_x(x));
      h = step_h * std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
    }

    traj.x_reached = x;
    traj.status = Termination::completed;
    return traj;
  }

 private:
  [[nodiscard]] bool feedback() const { return feedback_amplitude_.has_value(); }
  [[nodiscard]] static bool is_odd(std::int64_t q) { return (q % 2) != 0; }
  [[nodiscard]] static double quarter_level(std::int64_t q) { return static_cast<double>(q) * half_pi; }
  [[nodiscard]] double cell_sign() const { return is_odd(cell_) ? -1.0 : 1.0; }

  /// The feedback field above an odd boundary is k - a/(k(1+x)); sliding
  /// persists while that is <= 0.
  [[nodiscard]] bool slides_at(double x) const {
    const double a = *feedback_amplitude_;
    return a / (1.0 + x) >= cfg_.k * cfg_.k && slide_exit() > x;
  }
  [[nodiscard]] double slide_exit() const { return *feedback_amplitude_ / (cfg_.k * cfg_.k) - 1.0; }

  [[nodiscard]] double piece_potential(double x) const {
    if (sliding_) return cfg_.k * cfg_.k;
    if (feedback()) return -cell_sign() * *feedback_amplitude_ / (1.0 + x);
    if (table_) return table_->evaluate_in_cell(table_cell_, x);
    return evaluate(spec_, x);
  }

  [[nodiscard]] State rhs(double x, const State& y) const {
    const double v = piece_potential(x);
    const auto d = pruefer_rhs(y[0], v, cfg_.k);
    const double abs_sin = cell_sign() * std::sin(2.0 * y[0]);
    return {d.dtheta, d.dlog_r, abs_sin / (1.0 + x), abs_sin};
  }

  [[nodiscard]] double error_norm(const Stepper::Step& s) const {
    double norm = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double magnitude = i == 0 ? 2.0 * std::numbers::pi : std::max(std::abs(s.y0[i]), std::abs(s.y1[i]));
      const double scale = cfg_.abs_tol + cfg_.rel_tol * magnitude;
      norm = std::max(norm, std::abs(s.error[i]) / scale);
    }
    return norm;
  }

  [[nodiscard]] static bool finite_state(const State& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
  }

  /// Illinois iteration on the dense theta for theta = level inside the step.
  [[nodiscard]] double locate_level(const Stepper::Step& s, double level) const {
    double a = s.x0;
    double b = s.x0 + s.h;
    double fa = s.y0[0] - level;
    double fb = s.y1[0] - level;
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) return std::abs(fa) < std::abs(fb) ? a : b;
    const double stop = std::max(0.5 * cfg_.event_tol, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(level));
    for (int iter = 0; iter < 200; ++iter) {
      double c = b - fb * (b - a) / (fb - fa);
      const double lo = std::min(a, b);
      const double hi = std::max(a, b);
      if (!(c > lo && c < hi)) c = 0.5 * (a + b);
      const double fc = Stepper::interpolate(s, c, 0) - level;
      if (std::abs(fc) <= stop || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(c))) {
        return c;
      }
      if ((fc > 0.0) != (fb > 0.0)) {
        a = b;
        fa = fb;
      } else {
        fa *= 0.5;
      }
      b = c;
      fb = fc;
    }
    return b;
  }

  void cross_boundary(Trajectory& traj, double x, const State& y, bool up) {
    const std::int64_t q = up ? cell_ + 1 : cell_;
    if (up && q > max_quarter_) {
      max_quarter_ = q;
      traj.crossings.push_back(node(x, y));
    }
    if (feedback() && is_odd(q) && slides_at(x)) {
      begin_slide(traj, x, y);
      return;
    }
    cell_ = up ? q : q - 1;
    if (feedback()) push_switch(traj, EventKind::sign_switch, x, y);
  }

  void begin_slide(Trajectory& traj, double x, const State& y) {
    sliding_ = true;
    slide_exit_ = slide_exit();
    push_switch(traj, EventKind::slide_begin, x, y);
  }

  void push_switch(Trajectory& traj, EventKind kind, double x, const State& y) const {
    traj.switches.push_back({kind, node(x, y)});
  }

  [[nodiscard]] TrajectoryNode node(double x, const State& y) const {
    return {x, y[0], y[1], piece_potential(x), y[2], y[3]};
  }

  void emit_samples(Trajectory& traj, const Stepper::Step& s, double x_stop) {
    while (next_sample_ < sample_x_.size() && sample_x_[next_sample_] <= x_stop) {
      const double xs = sample_x_[next_sample_];
      State ys = s.y1;
      if (xs != x_stop) ys = s.h == 0.0 ? s.y0 : Stepper::interpolate(s, xs);
      traj.samples.push_back(node(xs, ys));
      ++next_sample_;
    }
  }

  void emit_samples_constant(Trajectory& traj, double x_stop, const State& y) {
    while (next_sample_ < sample_x_.size() && sample_x_[next_sample_] <= x_stop) {
      traj.samples.push_back(node(sample_x_[next_sample_], y));
      ++next_sample_;
    }
  }

  Trajectory& truncate(Trajectory& traj, double x, std::string message) {
    traj.status = Termination::truncated;
    traj.message = std::move(message);
    traj.x_reached = x;
    return traj;
  }

  static std::string format_x(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

  const PotentialSpec& spec_;
  IntegratorConfig cfg_;
  const TabulatedPotential* table_ = nullptr;
  std::optional<double> feedback_amplitude_;
  Stepper stepper_;
  std::vector<double> sample_x_;
  std::size_t next_sample_ = 0;
  std::size_t table_cell_ = 0;
  std::int64_t cell_ = 0;
  std::int64_t max_quarter_ = 0;
  bool sliding_ = false;
  double slide_exit_ = 0.0;
};

}  // namespace detail

/// Integrates the Pruefer system for `spec` at energy k^2 from theta(0) =
/// theta0, logR(0) = 0. A failed integration returns the partial trajectory
/// flagged truncated.
///
/// For the feedback potential, V takes the sign of sin 2theta on each smooth
/// piece. Where the angle reaches an odd multiple of pi/2 while
/// a/(1+x) >= k^2, both one-sided fields point into the switching line: theta
/// then stays on it until x = a/k^2 - 1, which is the solution for the
/// effective potential V = k^2 (recorded as such in the samples).
[[nodiscard]] inline Trajectory integrate(const PotentialSpec& spec, const IntegratorConfig& cfg) {
  detail::PrueferIntegrator integrator(spec, cfg);
  return integrator.run();
}

struct Crossing {
  std::size_t index = 0;
  double x = 0.0;
};

/// The crossing points x_i where theta first reaches (crossing_base + i) pi/2,
/// after checking that the sampled angle is non-decreasing past the first one.
[[nodiscard]] inline std::vector<Crossing> detect_crossings(const Trajectory& traj) {
  if (traj.crossings.empty()) return {};
  const double start = traj.crossings.front().x;
  double previous = -std::numeric_limits<double>::infinity();
  double previous_x = 0.0;
  for (const auto& s : traj.samples) {
    if (s.x < start) continue;
    const double slack = 1e-9 * std::max(1.0, std::abs(s.theta));
    if (s.theta < previous - slack) {
      throw NumericalError("detect_crossings: theta decreases between x = " + std::to_string(previous_x) +
                           " and x = " + std::to_string(s.x));
    }
    previous = std::max(previous, s.theta);
    previous_x = s.x;
  }
  std::vector<Crossing> out;
  out.reserve(traj.crossings.size());
  for (std::size_t i = 0; i < traj.crossings.size(); ++i) {
    if (i > 0 && !(traj.crossings[i].x > traj.crossings[i - 1].x)) {
      throw NumericalError("detect_crossings: crossing list not strictly increasing at index " + std::to_string(i + 1));
    }
    out.push_back({i + 1, traj.crossings[i].x});
  }
  return out;
}

}  // namespace pruefer
