#pragma once

// Trajectory files: `<name>.csv` holds metadata and the samples, the sibling
// `<name>.events.csv` holds switch and crossing events.

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pruefer/csv.hpp"
#include "pruefer/error.hpp"
#include "pruefer/integrate.hpp"
#include "pruefer/table_io.hpp"

namespace pruefer {

inline constexpr const char* kTrajectoryColumns = "x,theta,logR,V,wsin,asin";
inline constexpr const char* kEventColumns = "kind,x,theta,logR,V,wsin,asin";

[[nodiscard]] inline EventKind parse_event_kind(const std::string& text) {
  for (const auto kind : {EventKind::sign_switch, EventKind::crossing, EventKind::slide_begin, EventKind::slide_end}) {
    if (text == to_string(kind)) return kind;
  }
  throw IoError("unknown event kind '" + text + "'");
}

[[nodiscard]] inline std::filesystem::path events_path(const std::filesystem::path& trajectory_path) {
  auto p = trajectory_path;
  p.replace_extension(".events.csv");
  return p;
}

namespace detail {

inline void write_node(std::ostream& out, const TrajectoryNode& n) {
  out << csv::format_double(n.x) << ',' << csv::format_double(n.theta) << ',' << csv::format_double(n.log_r) << ','
      << csv::format_double(n.potential) << ',' << csv::format_double(n.weighted_sin) << ','
      << csv::format_double(n.abs_sin) << '\n';
}

[[nodiscard]] inline TrajectoryNode node_from(const std::vector<double>& row, std::size_t offset) {
  return {row[offset], row[offset + 1], row[offset + 2], row[offset + 3], row[offset + 4], row[offset + 5]};
}

}  // namespace detail

/// Metadata for a trajectory: potential parameters, then the integrator
/// configuration, then the run status. `table_file` names the table a
/// tabulated potential came from.
[[nodiscard]] inline std::vector<std::pair<std::string, std::string>> trajectory_metadata(
    const Trajectory& traj, const std::string& table_file = {}) {
  auto meta = spec_metadata(traj.potential);
  if (traj.potential.table()) {
    meta.emplace_back("interpolation", to_string(traj.potential.table()->rule()));
    if (!table_file.empty()) meta.emplace_back("table_file", table_file);
  }
  const auto& c = traj.config;
  meta.emplace_back("k", csv::format_double(c.k));
  meta.emplace_back("theta0", csv::format_double(c.theta0));
  meta.emplace_back("x_end", csv::format_double(c.x_end));
  meta.emplace_back("rel_tol", csv::format_double(c.rel_tol));
  meta.emplace_back("abs_tol", csv::format_double(c.abs_tol));
  meta.emplace_back("max_step_fraction", csv::format_double(c.max_step_fraction));
  meta.emplace_back("event_tol", csv::format_double(c.event_tol));
  meta.emplace_back("samples", std::to_string(c.samples));
  meta.emplace_back("prefix_samples", std::to_string(c.prefix_samples));
  meta.emplace_back("crossing_base", std::to_string(traj.crossing_base));
  meta.emplace_back("status", traj.truncated() ? "truncated" : "completed");
  meta.emplace_back("x_reached", csv::format_double(traj.x_reached));
  if (!traj.message.empty()) meta.emplace_back("message", traj.message);
  meta.emplace_back("generator_version", std::string(generator_version));
  return meta;
}

inline void write_trajectory(std::ostream& out, const Trajectory& traj, const std::string& table_file = {}) {
  csv::write_metadata(out, trajectory_metadata(traj, table_file));
  out << kTrajectoryColumns << '\n';
  for (const auto& s : traj.samples) detail::write_node(out, s);
}

/// Switch events and crossings merged in order of x (a crossing and a switch
/// at the same x keep switch-first order).
inline void write_events(std::ostream& out, const Trajectory& traj) {
  out << kEventColumns << '\n';
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < traj.switches.size() || j < traj.crossings.size()) {
    const bool take_switch =
        j == traj.crossings.size() || (i < traj.switches.size() && traj.switches[i].node.x <= traj.crossings[j].x);
    if (take_switch) {
      out << to_string(traj.switches[i].kind) << ',';
      detail::write_node(out, traj.switches[i++].node);
    } else {
      out << to_string(EventKind::crossing) << ',';
      detail::write_node(out, traj.crossings[j++]);
    }
  }
}

/// Writes `path` and its events sibling.
inline void export_trajectory(const std::filesystem::path& path, const Trajectory& traj,
                              const std::string& table_file = {}) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_trajectory(out, traj, table_file);
    if (!out) throw IoError("write failed: " + path.string());
  }
  const auto ev = events_path(path);
  std::ofstream out(ev, std::ios::binary);
  if (!out) throw IoError("cannot open " + ev.string() + " for writing");
  write_events(out, traj);
  if (!out) throw IoError("write failed: " + ev.string());
}

/// Reads the sample file. The potential of a tabulated trajectory cannot be
/// rebuilt from metadata alone and is passed in as `table_potential`.
[[nodiscard]] inline Trajectory read_trajectory(std::istream& in,
                                                const PotentialSpec* table_potential = nullptr) {
  const auto doc = csv::read(in, 6);
  std::string header;
  for (std::size_t i = 0; i < doc.columns.size(); ++i) header += (i ? "," : "") + doc.columns[i];
  if (header != kTrajectoryColumns) throw IoError(std::string("trajectory header must be '") + kTrajectoryColumns + "'");

  const auto& m = doc.metadata;
  Trajectory traj;
  if (csv::require(m, "variant") == "table") {
    if (!table_potential) throw IoError("tabulated trajectory: the table must be supplied");
    traj.potential = *table_potential;
  } else {
    traj.potential = spec_from_metadata(m);
  }
  auto& c = traj.config;
  c.k = csv::require_double(m, "k");
  c.theta0 = csv::require_double(m, "theta0");
  c.x_end = csv::require_double(m, "x_end");
  c.rel_tol = csv::require_double(m, "rel_tol");
  c.abs_tol = csv::require_double(m, "abs_tol");
  c.max_step_fraction = csv::require_double(m, "max_step_fraction");
  c.event_tol = csv::require_double(m, "event_tol");
  c.samples = std::stoul(csv::require(m, "samples"));
  c.prefix_samples = std::stoul(csv::require(m, "prefix_samples"));
  traj.crossing_base = std::stoll(csv::require(m, "crossing_base"));
  const auto& status = csv::require(m, "status");
  if (status != "completed" && status != "truncated") throw IoError("unknown status '" + status + "'");
  traj.status = status == "truncated" ? Termination::truncated : Termination::completed;
  traj.x_reached = csv::require_double(m, "x_reached");
  if (const auto it = m.find("message"); it != m.end()) traj.message = it->second;

  traj.samples.reserve(doc.rows.size());
  for (const auto& row : doc.rows) traj.samples.push_back(detail::node_from(row, 0));
  return traj;
}

/// Reads an events file into `traj`.
inline void read_events(std::istream& in, Trajectory& traj) {
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  traj.switches.clear();
  traj.crossings.clear();
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kEventColumns) throw IoError(std::string("events header must be '") + kEventColumns + "'");
      header_seen = true;
      continue;
    }
    const auto fields = csv::split(line);
    if (fields.size() != 7) throw IoError("line " + std::to_string(lineno) + ": expected 7 fields");
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(csv::parse_double(fields[i], lineno));
    const auto kind = parse_event_kind(std::string(fields[0]));
    const auto node = detail::node_from(row, 0);
    if (kind == EventKind::crossing) {
      traj.crossings.push_back(node);
    } else {
      traj.switches.push_back({kind, node});
    }
  }
  if (!header_seen) throw IoError("events file: missing header row");
}

/// Reads `path` and its events sibling. A tabulated trajectory loads its table
/// from the `table_file` entry, resolved relative to `path`.
[[nodiscard]] inline Trajectory import_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Trajectory traj;
  try {
    const auto doc = csv::read(in, 1);
    std::optional<PotentialSpec> table_spec;
    if (const auto v = doc.metadata.find("variant"); v != doc.metadata.end() && v->second == "table") {
      const auto tf = doc.metadata.find("table_file");
      if (tf == doc.metadata.end()) throw IoError("tabulated trajectory without 'table_file'");
      auto t = import_table(path.parent_path() / tf->second);
      table_spec = PotentialSpec::tabulated(std::move(t.table));
    }
    in.clear();
    in.seekg(0);
    traj = read_trajectory(in, table_spec ? &*table_spec : nullptr);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  const auto ev = events_path(path);
  std::ifstream events(ev, std::ios::binary);
  if (!events) throw IoError("cannot open " + ev.string());
  try {
    read_events(events, traj);
  } catch (const IoError& e) {
    throw IoError(ev.string() + ": " + e.what());
  }
  return traj;
}

}  // namespace pruefer
