#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "pruefer/error.hpp"

namespace pruefer {

/// V(x) = 0.
struct ZeroPotential {};

/// V(x) = sign * amplitude / (1 + x).
struct CoulombSign {
  double amplitude = 1.0;
  int sign = -1;
};

/// V(x) = -amplitude * sin(2 wavenumber x + phase) / (1 + x).
struct WignerVonNeumann {
  double amplitude = 1.0;
  double wavenumber = 1.0;
  double phase = 0.0;
};

/// V(x) = -(amplitude / (1 + x)) * sgn(sin 2 theta(x)) with sgn(0) = +1.
/// The potential is defined through the Pruefer angle of the solution it
/// drives, so it can only be evaluated together with that angle.
struct FeedbackSign {
  double amplitude = 1.0;
};

enum class Interpolation { piecewise_constant, linear };

/// Potential sampled on a strictly increasing grid. Evaluation never
/// extrapolates: x outside [front, back] is an error.
class TabulatedPotential {
 public:
  TabulatedPotential(std::vector<double> grid, std::vector<double> values,
                     Interpolation rule = Interpolation::piecewise_constant)
      : grid_(std::move(grid)), values_(std::move(values)), rule_(rule) {
    if (grid_.empty() || grid_.size() != values_.size()) {
      throw DomainError("tabulated potential: grid and values must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (!std::isfinite(grid_[i]) || !std::isfinite(values_[i])) {
        throw DomainError("tabulated potential: non-finite entry at row " + std::to_string(i));
      }
      if (i > 0 && !(grid_[i] > grid_[i - 1])) {
        throw DomainError("tabulated potential: grid not strictly increasing at row " + std::to_string(i));
      }
    }
  }

  [[nodiscard]] std::span<const double> grid() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] Interpolation rule() const { return rule_; }
  [[nodiscard]] double x_min() const { return grid_.front(); }
  [[nodiscard]] double x_max() const { return grid_.back(); }

  /// Index i with grid[i] <= x < grid[i+1] (the last cell is closed). `hint`
  /// is tried first, which makes sequential sweeps O(1) per call.
  [[nodiscard]] std::size_t locate(double x, std::size_t hint = 0) const {
    if (!(x >= grid_.front() && x <= grid_.back())) {
      throw DomainError("tabulated potential: x = " + std::to_string(x) + " outside table domain [" +
                        std::to_string(grid_.front()) + ", " + std::to_string(grid_.back()) + "]");
    }
    const std::size_t last = grid_.size() - 1;
    if (last == 0) return 0;
    if (hint < last && grid_[hint] <= x && x < grid_[hint + 1]) return hint;
    if (hint + 1 < last && grid_[hint + 1] <= x && x < grid_[hint + 2]) return hint + 1;
    if (x >= grid_[last]) return last - 1;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    return static_cast<std::size_t>(it - grid_.begin()) - 1;
  }

  [[nodiscard]] double evaluate(double x, std::size_t* hint = nullptr) const {
    const std::size_t i = locate(x, hint ? *hint : 0);
    if (hint) *hint = i;
    if (grid_.size() == 1) return values_[0];
    if (rule_ == Interpolation::piecewise_constant) {
      return x >= grid_.back() ? values_.back() : values_[i];
    }
    const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return values_[i] + t * (values_[i + 1] - values_[i]);
  }

  /// The interpolant of cell [grid[cell], grid[cell+1]] evaluated at x, closed at
  /// both ends. Integrators that align steps with the nodes use this so a stage
  /// sitting on the right node still sees the cell it is integrating.
  [[nodiscard]] double evaluate_in_cell(std::size_t cell, double x) const {
    if (grid_.size() == 1 || rule_ == Interpolation::piecewise_constant) return values_[cell];
    const double t = (x - grid_[cell]) / (grid_[cell + 1] - grid_[cell]);
    return values_[cell] + t * (values_[cell + 1] - values_[cell]);
  }

  /// Number of cells usable with evaluate_in_cell.
  [[nodiscard]] std::size_t cell_count() const { return grid_.size() > 1 ? grid_.size() - 1 : 1; }

  /// Smallest grid node strictly greater than x, if any.
  [[nodiscard]] std::optional<double> next_node(double x) const {
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    if (it == grid_.end()) return std::nullopt;
    return *it;
  }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  Interpolation rule_;
};

enum class PotentialKind { zero, coulomb_sign, wigner_von_neumann, feedback_sign, tabulated };

[[nodiscard]] inline const char* to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::zero: return "zero";
    case PotentialKind::coulomb_sign: return "coulomb-sign";
    case PotentialKind::wigner_von_neumann: return "wigner-von-neumann";
    case PotentialKind::feedback_sign: return "feedback";
    case PotentialKind::tabulated: return "table";
  }
  return "unknown";
}

/// Closed description of one potential family. Immutable once built; the
/// factories enforce each family's invariants.
class PotentialSpec {
 public:
  using Variant = std::variant<ZeroPotential, CoulombSign, WignerVonNeumann, FeedbackSign,
                               std::shared_ptr<const TabulatedPotential>>;

  PotentialSpec() : data_(ZeroPotential{}) {}

  static PotentialSpec zero() { return PotentialSpec(ZeroPotential{}); }

  static PotentialSpec coulomb_sign(double amplitude, int sign) {
    require_finite(amplitude, "coulomb-sign amplitude");
    if (amplitude < 0.0) throw DomainError("coulomb-sign amplitude must be >= 0");
    if (sign != 1 && sign != -1) throw DomainError("coulomb-sign sign must be +1 or -1");
    return PotentialSpec(CoulombSign{amplitude, sign});
  }

  static PotentialSpec wigner_von_neumann(double amplitude, double wavenumber, double phase) {
    require_finite(amplitude, "wigner-von-neumann amplitude");
    require_finite(wavenumber, "wigner-von-neumann wavenumber");
    require_finite(phase, "wigner-von-neumann phase");
    if (amplitude < 0.0) throw DomainError("wigner-von-neumann amplitude must be >= 0");
    return PotentialSpec(WignerVonNeumann{amplitude, wavenumber, phase});
  }

  static PotentialSpec feedback_sign(double amplitude) {
    require_finite(amplitude, "feedback amplitude");
    if (!(amplitude > 0.0)) throw DomainError("feedback amplitude must be > 0");
    return PotentialSpec(FeedbackSign{amplitude});
  }

  static PotentialSpec tabulated(TabulatedPotential table) {
    return PotentialSpec(std::make_shared<const TabulatedPotential>(std::move(table)));
  }

  [[nodiscard]] const Variant& variant() const { return data_; }

  [[nodiscard]] PotentialKind kind() const {
    return static_cast<PotentialKind>(data_.index());
  }

  [[nodiscard]] bool is_feedback() const { return kind() == PotentialKind::feedback_sign; }

  /// Envelope amplitude of the analytic families (0 for Zero); nullopt for tables.
  [[nodiscard]] std::optional<double> amplitude() const {
    return std::visit(
        [](const auto& v) -> std::optional<double> {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, ZeroPotential>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, std::shared_ptr<const TabulatedPotential>>) {
            return std::nullopt;
          } else {
            return v.amplitude;
          }
        },
        data_);
  }

  [[nodiscard]] const TabulatedPotential* table() const {
    const auto* p = std::get_if<std::shared_ptr<const TabulatedPotential>>(&data_);
    return p ? p->get() : nullptr;
  }

 private:
  explicit PotentialSpec(Variant v) : data_(std::move(v)) {}

  static void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
  }

  Variant data_;
};

/// sgn with the convention sgn(0) = +1.
[[nodiscard]] inline double sign_convention(double v) { return v < 0.0 ? -1.0 : 1.0; }

/// V(x). `theta` must be given exactly when the spec is FeedbackSign.
[[nodiscard]] inline double evaluate(const PotentialSpec& spec, double x,
                                     std::optional<double> theta = std::nullopt) {
  if (!(x >= 0.0)) throw DomainError("potential evaluated at x < 0");
  if (spec.is_feedback() != theta.has_value()) {
    throw DomainError(spec.is_feedback() ? "feedback potential requires the Pruefer angle"
                                         : "Pruefer angle supplied for a non-feedback potential");
  }
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ZeroPotential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, CoulombSign>) {
          return v.sign * v.amplitude / (1.0 + x);
        } else if constexpr (std::is_same_v<T, WignerVonNeumann>) {
          return -v.amplitude * std::sin(2.0 * v.wavenumber * x + v.phase) / (1.0 + x);
        } else if constexpr (std::is_same_v<T, FeedbackSign>) {
          return -(v.amplitude / (1.0 + x)) * sign_convention(std::sin(2.0 * *theta));
        } else {
          return v->evaluate(x);
        }
      },
      spec.variant());
}

/// Log-windowed estimate of limsup (1+x)|V(x)|.
struct EnvelopeEstimate {
  double tail_start = 0.0;
  double tail_end = 0.0;
  std::size_t window_count = 0;
  std::vector<double> window_suprema;
  double limsup = 0.0;
  bool monotone_decreasing = true;
};

namespace detail {

inline EnvelopeEstimate summarize_windows(double tail_start, double tail_end,
                                          std::vector<double> suprema) {
  EnvelopeEstimate est;
  est.tail_start = tail_start;
  est.tail_end = tail_end;
  est.window_count = suprema.size();
  const std::size_t half = (suprema.size() + 1) / 2;
  est.limsup = *std::max_element(suprema.end() - static_cast<std::ptrdiff_t>(half), suprema.end());
  for (std::size_t i = 1; i < suprema.size(); ++i) {
    if (suprema[i] > suprema[i - 1]) est.monotone_decreasing = false;
  }
  est.window_suprema = std::move(suprema);
  return est;
}

inline std::vector<double> log_window_edges(double lo, double hi, std::size_t count) {
  std::vector<double> edges(count + 1);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i <= count; ++i) {
    edges[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count));
  }
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

}  // namespace detail

/// Envelope of a closed-form potential over [tail_start, tail_end], sampling
/// each log window at `samples_per_window` log-spaced points.
[[nodiscard]] inline EnvelopeEstimate estimate_envelope(const PotentialSpec& spec, double tail_start,
                                                        std::size_t window_count, double tail_end,
                                                        std::size_t samples_per_window = 256) {
  if (const auto* table = spec.table()) {
    (void)table;
    throw DomainError("estimate_envelope: use the tabulated overload for tables");
  }
  if (spec.is_feedback()) {
    throw DomainError("estimate_envelope: the feedback potential needs its trajectory; export a table first");
  }
  if (!(tail_start > 0.0) || !(tail_end > tail_start)) throw DomainError("estimate_envelope: empty tail");
  if (window_count < 2) throw DomainError("estimate_envelope: window_count must be >= 2");
  if (samples_per_window < 2) throw DomainError("estimate_envelope: need >= 2 samples per window");

  const auto edges = detail::log_window_edges(tail_start, tail_end, window_count);
  std::vector<double> suprema(window_count, 0.0);
  for (std::size_t w = 0; w < window_count; ++w) {
    const double lo = edges[w];
    const double hi = edges[w + 1];
    for (std::size_t j = 0; j < samples_per_window; ++j) {
      const double x = lo * std::pow(hi / lo, static_cast<double>(j) / static_cast<double>(samples_per_window - 1));
      const double value = (1.0 + x) * std::abs(evaluate(spec, x));
      if (!std::isfinite(value)) throw DomainError("estimate_envelope: non-finite potential value");
      suprema[w] = std::max(suprema[w], value);
    }
  }
  return detail::summarize_windows(tail_start, tail_end, std::move(suprema));
}

/// Envelope of a table over [tail_start, x_max], using the grid nodes as samples.
[[nodiscard]] inline EnvelopeEstimate estimate_envelope(const TabulatedPotential& table, double tail_start,
                                                        std::size_t window_count) {
  if (!(tail_start > 0.0)) throw DomainError("estimate_envelope: tail start must be > 0");
  if (window_count < 2) throw DomainError("estimate_envelope: window_count must be >= 2");
  if (tail_start < table.x_min() || !(table.x_max() > tail_start)) {
    throw DomainError("estimate_envelope: empty tail (table does not cover [T, x_max])");
  }
  const auto edges = detail::log_window_edges(tail_start, table.x_max(), window_count);
  std::vector<double> suprema(window_count, 0.0);
  std::vector<bool> seen(window_count, false);
  const auto grid = table.grid();
  const auto values = table.values();
  std::size_t w = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    if (x < tail_start) continue;
    while (w + 1 < window_count && x >= edges[w + 1]) ++w;
    suprema[w] = std::max(suprema[w], (1.0 + x) * std::abs(values[i]));
    seen[w] = true;
  }
  for (std::size_t i = 0; i < window_count; ++i) {
    if (!seen[i]) throw DomainError("estimate_envelope: window " + std::to_string(i) + " has no table nodes");
  }
  return detail::summarize_windows(tail_start, table.x_max(), std::move(suprema));
}

}  // namespace pruefer
