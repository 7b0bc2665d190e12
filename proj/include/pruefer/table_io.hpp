#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pruefer/csv.hpp"
#include "pruefer/error.hpp"
#include "pruefer/integrate.hpp"
#include "pruefer/potential.hpp"

namespace pruefer {

[[nodiscard]] inline const char* to_string(Interpolation rule) {
  return rule == Interpolation::linear ? "linear" : "piecewise_constant";
}

[[nodiscard]] inline Interpolation parse_interpolation(const std::string& text) {
  if (text == "linear") return Interpolation::linear;
  if (text == "piecewise_constant") return Interpolation::piecewise_constant;
  throw IoError("unknown interpolation rule '" + text + "'");
}

/// `variant` plus the parameters of a closed-form family, as metadata entries.
[[nodiscard]] inline std::vector<std::pair<std::string, std::string>> spec_metadata(const PotentialSpec& spec) {
  std::vector<std::pair<std::string, std::string>> out{{"variant", to_string(spec.kind())}};
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CoulombSign>) {
          out.emplace_back("a", csv::format_double(v.amplitude));
          out.emplace_back("sign", std::to_string(v.sign));
        } else if constexpr (std::is_same_v<T, WignerVonNeumann>) {
          out.emplace_back("c", csv::format_double(v.amplitude));
          out.emplace_back("kappa", csv::format_double(v.wavenumber));
          out.emplace_back("phi", csv::format_double(v.phase));
        } else if constexpr (std::is_same_v<T, FeedbackSign>) {
          out.emplace_back("a", csv::format_double(v.amplitude));
        }
      },
      spec.variant());
  return out;
}

/// Inverse of spec_metadata for the closed-form families.
[[nodiscard]] inline PotentialSpec spec_from_metadata(const Metadata& m) {
  const auto& variant = csv::require(m, "variant");
  if (variant == "zero") return PotentialSpec::zero();
  if (variant == "coulomb-sign") {
    return PotentialSpec::coulomb_sign(csv::require_double(m, "a"), std::stoi(csv::require(m, "sign")));
  }
  if (variant == "wigner-von-neumann") {
    return PotentialSpec::wigner_von_neumann(csv::require_double(m, "c"), csv::require_double(m, "kappa"),
                                             csv::require_double(m, "phi"));
  }
  if (variant == "feedback") return PotentialSpec::feedback_sign(csv::require_double(m, "a"));
  throw IoError("metadata variant '" + variant + "' is not a closed-form potential");
}

/// A tabulated potential together with the metadata describing where it came from.
struct PotentialTable {
  TabulatedPotential table;
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Samples a closed-form potential (or re-emits a table) on `grid`.
[[nodiscard]] inline PotentialTable make_table(const PotentialSpec& spec, std::span<const double> grid,
                                               Interpolation rule = Interpolation::piecewise_constant) {
  if (spec.is_feedback()) throw DomainError("export_table: the feedback potential needs its trajectory");
  std::vector<double> xs(grid.begin(), grid.end());
  std::vector<double> vs;
  vs.reserve(xs.size());
  for (const double x : xs) vs.push_back(evaluate(spec, x));
  auto meta = spec_metadata(spec);
  meta.emplace_back("interpolation", to_string(rule));
  meta.emplace_back("generator_version", std::string(generator_version));
  return {TabulatedPotential(std::move(xs), std::move(vs), rule), std::move(meta)};
}

/// How the feedback potential looks on one stretch between switch events.
struct FeedbackPiece {
  double begin = 0.0;
  double end = 0.0;
  /// +1: V = -a/(1+x); -1: V = +a/(1+x); 0: sliding, V = k^2
  int sign = 1;
};

/// Reconstructs the piecewise description of the realized feedback potential
/// from a trajectory's switch events.
[[nodiscard]] inline std::vector<FeedbackPiece> feedback_pieces(const Trajectory& traj) {
  if (!traj.potential.is_feedback()) throw DomainError("feedback_pieces: not a feedback trajectory");
  const std::int64_t cell = static_cast<std::int64_t>(std::floor(traj.config.theta0 / half_pi));
  int sign = cell % 2 == 0 ? 1 : -1;
  std::vector<FeedbackPiece> pieces;
  double begin = 0.0;
  const auto close_piece = [&](double end) {
    if (end > begin) pieces.push_back({begin, end, sign});
    begin = end;
  };
  for (const auto& e : traj.switches) {
    close_piece(e.node.x);
    switch (e.kind) {
      case EventKind::sign_switch: sign = -sign; break;
      case EventKind::slide_begin: sign = 0; break;
      case EventKind::slide_end: sign = -1; break;
      case EventKind::crossing: break;
    }
  }
  close_piece(traj.x_reached);
  return pieces;
}

struct FeedbackTableOptions {
  /// node spacing relative to (1 + x)
  double relative_spacing = 2e-4;
  std::size_t min_points_per_piece = 2;
  Interpolation rule = Interpolation::linear;
};

/// Tabulates the potential a feedback trajectory realized. Every switch point
/// is a node; the node just before it (at relative distance 1e-9) carries the
/// old sign, so linear interpolation reproduces the jump up to that gap.
[[nodiscard]] inline PotentialTable make_feedback_table(const Trajectory& traj,
                                                        const FeedbackTableOptions& options = {}) {
  if (traj.truncated()) throw DomainError("export_table: trajectory is truncated");
  const auto* fb = std::get_if<FeedbackSign>(&traj.potential.variant());
  if (!fb) throw DomainError("export_table: not a feedback trajectory");
  const double a = fb->amplitude;
  const double k2 = traj.config.k * traj.config.k;
  const auto value = [&](const FeedbackPiece& p, double x) {
    return p.sign == 0 ? k2 : -p.sign * a / (1.0 + x);
  };

  std::vector<double> xs;
  std::vector<double> vs;
  const auto pieces = feedback_pieces(traj);
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const auto& p = pieces[j];
    const bool last = j + 1 == pieces.size();
    const double span = std::log((1.0 + p.end) / (1.0 + p.begin));
    const auto n = std::max<std::size_t>(options.min_points_per_piece,
                                         static_cast<std::size_t>(std::ceil(span / options.relative_spacing)));
    const double gap = 1e-9 * (1.0 + p.end);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (1.0 + p.begin) * std::exp(span * static_cast<double>(i) / static_cast<double>(n)) - 1.0;
      const double xi = i == 0 ? p.begin : x;
      if (!last && xi >= p.end - gap) break;
      if (!xs.empty() && !(xi > xs.back())) continue;
      xs.push_back(xi);
      vs.push_back(value(p, xi));
    }
    const double tail = last ? p.end : p.end - gap;
    if (tail > xs.back()) {
      xs.push_back(tail);
      vs.push_back(value(p, tail));
    }
  }

  auto meta = spec_metadata(traj.potential);
  meta.emplace_back("k", csv::format_double(traj.config.k));
  meta.emplace_back("theta0", csv::format_double(traj.config.theta0));
  meta.emplace_back("interpolation", to_string(options.rule));
  meta.emplace_back("generator_version", std::string(generator_version));
  return {TabulatedPotential(std::move(xs), std::move(vs), options.rule), std::move(meta)};
}

/// The feedback potential of a trajectory sampled on a caller-chosen grid
/// (nodes beyond the trajectory are rejected).
[[nodiscard]] inline PotentialTable make_feedback_table(const Trajectory& traj, std::span<const double> grid,
                                                        Interpolation rule = Interpolation::piecewise_constant) {
  const auto* fb = std::get_if<FeedbackSign>(&traj.potential.variant());
  if (!fb) throw DomainError("export_table: not a feedback trajectory");
  const auto pieces = feedback_pieces(traj);
  std::vector<double> xs(grid.begin(), grid.end());
  std::vector<double> vs;
  std::size_t j = 0;
  for (const double x : xs) {
    if (x < 0.0 || x > traj.x_reached) throw DomainError("export_table: grid node outside the trajectory");
    while (j + 1 < pieces.size() && x >= pieces[j].end) ++j;
    const auto& p = pieces[j];
    vs.push_back(p.sign == 0 ? traj.config.k * traj.config.k : -p.sign * fb->amplitude / (1.0 + x));
  }
  auto meta = spec_metadata(traj.potential);
  meta.emplace_back("k", csv::format_double(traj.config.k));
  meta.emplace_back("theta0", csv::format_double(traj.config.theta0));
  meta.emplace_back("interpolation", to_string(rule));
  meta.emplace_back("generator_version", std::string(generator_version));
  return {TabulatedPotential(std::move(xs), std::move(vs), rule), std::move(meta)};
}

inline void write_table(std::ostream& out, const PotentialTable& t) {
  csv::write_metadata(out, t.metadata);
  out << "x,V\n";
  const auto grid = t.table.grid();
  const auto values = t.table.values();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << csv::format_double(grid[i]) << ',' << csv::format_double(values[i]) << '\n';
  }
}

inline void export_table(const std::filesystem::path& path, const PotentialTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_table(out, t);
  if (!out) throw IoError("write failed: " + path.string());
}

/// Reads the table format; `interpolation` defaults to piecewise_constant.
[[nodiscard]] inline PotentialTable read_table(std::istream& in) {
  auto doc = csv::read(in, 2);
  if (doc.columns.size() != 2 || doc.columns[0] != "x" || doc.columns[1] != "V") {
    throw IoError("table header must be 'x,V'");
  }
  std::vector<double> xs;
  std::vector<double> vs;
  for (const auto& row : doc.rows) {
    xs.push_back(row[0]);
    vs.push_back(row[1]);
  }
  const auto it = doc.metadata.find("interpolation");
  const auto rule = it == doc.metadata.end() ? Interpolation::piecewise_constant : parse_interpolation(it->second);
  PotentialTable out{TabulatedPotential(std::move(xs), std::move(vs), rule), {}};
  // keep the writer's key order where we know it
  for (const char* key : {"variant", "a", "sign", "c", "kappa", "phi", "k", "theta0", "interpolation",
                          "generator_version"}) {
    if (auto m = doc.metadata.find(key); m != doc.metadata.end()) {
      out.metadata.emplace_back(m->first, m->second);
      doc.metadata.erase(m);
    }
  }
  for (auto& [key, value] : doc.metadata) out.metadata.emplace_back(key, value);
  return out;
}

[[nodiscard]] inline PotentialTable import_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_table(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace pruefer
