// pruefer: integrate, synthesize, fit and scan half-line Schroedinger problems
// through the Pruefer angle/amplitude representation.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pruefer/analysis.hpp"
#include "pruefer/integrate.hpp"
#include "pruefer/oracle.hpp"
#include "pruefer/report.hpp"
#include "pruefer/table_io.hpp"
#include "pruefer/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace pruefer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Bad flag values detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string out_dir = ".";
  unsigned workers = 1;
  double rel_tol = IntegratorConfig{}.rel_tol;
  double abs_tol = IntegratorConfig{}.abs_tol;
  std::size_t samples = IntegratorConfig{}.samples;
  // reserved: every algorithm here is deterministic
  std::uint64_t seed = 0;

  [[nodiscard]] IntegratorConfig config() const {
    IntegratorConfig cfg;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = abs_tol;
    cfg.samples = samples;
    return cfg;
  }

  [[nodiscard]] fs::path out(const std::string& name) const {
    fs::create_directories(out_dir);
    return fs::path(out_dir) / name;
  }
};

struct PotentialOptions {
  std::string potential = "zero";
  double a = 1.0;
  int sign = -1;
  double c = 1.0;
  double kappa = 2.0;
  double phi = 0.0;
  std::string file;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--potential", potential, "zero | coulomb-sign | wigner-von-neumann | feedback | table")
        ->check(CLI::IsMember({"zero", "coulomb-sign", "wigner-von-neumann", "feedback", "table"}))
        ->capture_default_str();
    cmd.add_option("--a", a, "amplitude of coulomb-sign / feedback")->capture_default_str();
    cmd.add_option("--sign", sign, "sign of coulomb-sign (+1 or -1)")->capture_default_str();
    cmd.add_option("--c", c, "wigner-von-neumann amplitude")->capture_default_str();
    cmd.add_option("--kappa", kappa, "wigner-von-neumann wavenumber")->capture_default_str();
    cmd.add_option("--phi", phi, "wigner-von-neumann phase")->capture_default_str();
    cmd.add_option("--file", file, "tabulated potential (for --potential table)");
  }

  [[nodiscard]] PotentialSpec spec() const {
    if (potential == "zero") return PotentialSpec::zero();
    if (potential == "coulomb-sign") return PotentialSpec::coulomb_sign(a, sign);
    if (potential == "wigner-von-neumann") return PotentialSpec::wigner_von_neumann(c, kappa, phi);
    if (potential == "feedback") return PotentialSpec::feedback_sign(a);
    if (file.empty()) throw UsageError("--potential table needs --file");
    return PotentialSpec::tabulated(import_table(file).table);
  }
};

/// --k or --lambda (k = sqrt(lambda)), at most one of them.
struct EnergyOptions {
  double k = 1.0;
  double lambda = 0.0;
  CLI::Option* k_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;

  void add_to(CLI::App& cmd) {
    k_opt = cmd.add_option("--k", k, "wavenumber, energy lambda = k^2")->capture_default_str();
    lambda_opt = cmd.add_option("--lambda", lambda, "energy; k = sqrt(lambda)");
    k_opt->excludes(lambda_opt);
  }

  [[nodiscard]] double value() const {
    const double out = lambda_opt->count() > 0 ? std::sqrt(lambda) : k;
    if (!(out > 0.0) || !std::isfinite(out)) throw UsageError("need k > 0 (or lambda > 0)");
    return out;
  }
};

std::string fmt(double v) { return csv::format_double(v); }

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

/// Path of `file` as seen from `dir`, for the `table_file` metadata entry.
std::string relative_to(const std::string& file, const fs::path& dir) {
  return fs::relative(fs::absolute(file), fs::absolute(dir)).generic_string();
}

// ---- integrate --------------------------------------------------------------

struct IntegrateCommand {
  PotentialOptions pot;
  EnergyOptions energy;
  double theta0 = IntegratorConfig{}.theta0;
  std::optional<double> x_end;
  std::string output = "trajectory.csv";

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("integrate", "integrate the Pruefer system and write trajectory + events");
    pot.add_to(*cmd);
    energy.add_to(*cmd);
    cmd->add_option("--theta0", theta0, "initial angle")->capture_default_str();
    cmd->add_option("--x-end", x_end, "end of the interval (default 1e4, or the table's end)");
    cmd->add_option("--output", output, "trajectory file name in --out-dir")->capture_default_str();
  }

  int run(const GlobalOptions& g) const {
    const auto spec = pot.spec();
    auto cfg = g.config();
    cfg.k = energy.value();
    cfg.theta0 = theta0;
    cfg.x_end = x_end.value_or(spec.table() ? spec.table()->x_max() : 1e4);
    const auto traj = integrate(spec, cfg);
    const auto path = g.out(output);
    export_trajectory(path, traj, spec.table() ? relative_to(pot.file, path.parent_path()) : std::string());
    std::cout << "wrote " << path.generic_string() << " (" << traj.samples.size() << " samples, "
              << traj.switches.size() << " switch events, " << traj.crossings.size() << " crossings)\n";
    if (traj.truncated()) {
      std::cerr << "error: " << traj.message << '\n';
      return kExitFailure;
    }
    return kExitOk;
  }
};

// ---- synthesize -------------------------------------------------------------

struct SynthesizeCommand {
  double a = 1.0;
  EnergyOptions energy;
  double theta0 = IntegratorConfig{}.theta0;
  double x_end = 1e5;
  std::string output = "potential.csv";

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("synthesize", "build the feedback potential with an embedded eigenvalue and export it");
    cmd->add_option("--a", a, "envelope amplitude, limsup |x V| = a")->capture_default_str();
    energy.add_to(*cmd);
    cmd->add_option("--theta0", theta0, "initial angle (selects the boundary condition)")->capture_default_str();
    cmd->add_option("--x-end", x_end, "end of the tabulated interval")->capture_default_str();
    cmd->add_option("--output", output, "table file name in --out-dir")->capture_default_str();
  }

  int run(const GlobalOptions& g) const {
    if (!(a > 0.0)) throw UsageError("--a must be > 0");
    const double k = energy.value();
    const double threshold = max_eigenvalue_bound(a);
    if (k * k >= threshold) {
      std::cerr << "refusing: lambda = " << fixed(k * k) << " >= 4a^2/pi^2 = " << fixed(threshold)
                << "; no eigenvalue can exist at or above this energy (threshold " << fixed(threshold) << ")\n";
      return kExitUsage;
    }
    auto cfg = g.config();
    cfg.k = k;
    cfg.theta0 = theta0;
    cfg.x_end = x_end;
    const auto traj = integrate(PotentialSpec::feedback_sign(a), cfg);
    if (traj.truncated()) {
      std::cerr << "error: " << traj.message << '\n';
      return kExitFailure;
    }
    const auto table = make_feedback_table(traj);
    const auto path = g.out(output);
    export_table(path, table);
    const double tail_start = std::max(10.0, x_end * 1e-3);
    const auto envelope = estimate_envelope(table.table, tail_start, 8);
    std::cout << "wrote " << path.generic_string() << " (" << table.table.grid().size() << " rows)\n"
              << "threshold 4a^2/pi^2: " << fixed(threshold) << '\n'
              << "envelope estimate limsup|xV| over [" << fmt(tail_start) << ", " << fmt(x_end)
              << "]: " << fixed(envelope.limsup) << '\n'
              << "predicted decay exponent a/(k pi): " << fixed(a / (k * std::numbers::pi)) << '\n';
    return kExitOk;
  }
};

// ---- fit-decay --------------------------------------------------------------

struct FitCommand {
  std::string input;
  std::optional<double> lo;
  std::optional<double> hi;
  std::optional<double> a;
  std::string output;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("fit-decay", "fit logR ~ -p ln x on a trajectory file; with --a, give the verdict");
    cmd->add_option("--input", input, "trajectory CSV")->required();
    cmd->add_option("--lo", lo, "window start (default min(1e3, x_end/100))");
    cmd->add_option("--hi", hi, "window end (default x_end)");
    cmd->add_option("--a", a, "envelope amplitude; adds the eigenvalue verdict");
    cmd->add_option("--output", output, "also write the JSON to this file in --out-dir");
  }

  int run(const GlobalOptions& g) const {
    const auto traj = import_trajectory(input);
    Json j;
    if (a) {
      if (lo || hi) throw UsageError("--a uses the default window; drop --lo/--hi");
      j = to_json(verdict(traj, *a, traj.config.k));
    } else {
      auto window = default_fit_window(traj.x_reached);
      if (lo) window.lo = *lo;
      if (hi) window.hi = *hi;
      j = to_json(fit_decay(traj, window));
    }
    const auto text = j.dump() + "\n";
    if (!output.empty()) write_text(g.out(output), text);
    std::cout << text;
    return kExitOk;
  }
};

// ---- sweeps -----------------------------------------------------------------

/// Values from explicit lists or lo,hi,step ranges. Range points are rounded
/// to 12 significant digits so that 0.4 + 3*0.05 prints as 0.55.
std::vector<double> expand(const std::vector<double>& list, const std::vector<double>& range, const char* name) {
  if (!list.empty() && !range.empty()) throw UsageError(std::string("give --") + name + " or --" + name + "-range, not both");
  if (!range.empty()) {
    const double lo = range[0];
    const double hi = range[1];
    const double step = range[2];
    if (!(step > 0.0) || !(hi >= lo)) throw UsageError(std::string("--") + name + "-range needs lo <= hi and step > 0");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
      const double v = lo + static_cast<double>(i) * step;
      if (v > hi + 1e-9 * step) break;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", v);
      out.push_back(std::strtod(buf, nullptr));
    }
    return out;
  }
  return list;
}

struct SweepPoint {
  double a = 0.0;
  double k = 0.0;
  double theta0 = 0.0;
};

struct SweepResult {
  SweepPoint point;
  std::optional<EigenvalueVerdict> verdict;
  std::optional<Trajectory> trajectory;
  std::string error;
};

struct SweepOptions {
  std::vector<double> a_list;
  std::vector<double> a_range;
  std::vector<double> k_list;
  std::vector<double> k_range;
  std::vector<double> lambda_list;
  std::vector<double> theta0_list{IntegratorConfig{}.theta0};
  double x_end = 1e6;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--a", a_list, "amplitudes (comma separated); a = 0 runs the zero potential")->delimiter(',');
    cmd.add_option("--a-range", a_range, "lo,hi,step")->delimiter(',')->expected(3);
    cmd.add_option("--k", k_list, "wavenumbers (comma separated)")->delimiter(',');
    cmd.add_option("--k-range", k_range, "lo,hi,step")->delimiter(',')->expected(3);
    cmd.add_option("--lambda", lambda_list, "energies (comma separated), k = sqrt(lambda)")->delimiter(',');
    cmd.add_option("--theta0", theta0_list, "initial angles (comma separated)")->delimiter(',');
    cmd.add_option("--x-end", x_end, "end of every integration")->capture_default_str();
  }

  /// Grid in (a, k, theta0) order, theta0 varying fastest.
  [[nodiscard]] std::vector<SweepPoint> points() const {
    const auto as = expand(a_list, a_range, "a");
    auto ks = expand(k_list, k_range, "k");
    if (!lambda_list.empty()) {
      if (!ks.empty()) throw UsageError("give k values or --lambda, not both");
      for (const double l : lambda_list) {
        if (!(l > 0.0)) throw UsageError("--lambda values must be > 0");
        ks.push_back(std::sqrt(l));
      }
    }
    if (as.empty() || ks.empty() || theta0_list.empty()) throw UsageError("sweep needs a, k (or lambda) and theta0 values");
    for (const double a : as) {
      if (!(a >= 0.0)) throw UsageError("a values must be >= 0");
    }
    for (const double k : ks) {
      if (!(k > 0.0)) throw UsageError("k values must be > 0");
    }
    std::vector<SweepPoint> out;
    for (const double a : as) {
      for (const double k : ks) {
        for (const double t : theta0_list) out.push_back({a, k, t});
      }
    }
    return out;
  }
};

/// Runs every point on a pool of `workers` threads; results come back in
/// grid order whatever the scheduling.
std::vector<SweepResult> run_sweep(const std::vector<SweepPoint>& points, const IntegratorConfig& base,
                                   double x_end, unsigned workers, bool keep_trajectories) {
  std::vector<SweepResult> results(points.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      auto& r = results[i];
      r.point = points[i];
      try {
        auto cfg = base;
        cfg.k = r.point.k;
        cfg.theta0 = r.point.theta0;
        cfg.x_end = x_end;
        const auto spec = r.point.a > 0.0 ? PotentialSpec::feedback_sign(r.point.a) : PotentialSpec::zero();
        auto traj = integrate(spec, cfg);
        r.verdict = verdict(traj, r.point.a, r.point.k);
        if (keep_trajectories) r.trajectory = std::move(traj);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return results;
}

Json result_json(const SweepResult& r) {
  Json j;
  j["a"] = r.point.a;
  j["k"] = r.point.k;
  j["theta0"] = r.point.theta0;
  if (!r.verdict) {
    j["error"] = r.error;
    return j;
  }
  const auto v = to_json(*r.verdict);
  for (const auto& [key, value] : v.items()) {
    if (key != "a" && key != "k") j[key] = value;
  }
  return j;
}

struct FlipSummary {
  double a = 0.0;
  double theta0 = 0.0;
  std::optional<double> flip_k;
  std::optional<double> last_embedded;
  std::optional<double> first_not;
};

std::vector<FlipSummary> summarize(const std::vector<SweepResult>& results) {
  std::vector<FlipSummary> out;
  for (const auto& r : results) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const FlipSummary& s) {
      return s.a == r.point.a && s.theta0 == r.point.theta0;
    });
    if (!seen) out.push_back({r.point.a, r.point.theta0, {}, {}, {}});
  }
  for (auto& s : out) {
    std::vector<std::pair<double, double>> curve;  // (k, p)
    for (const auto& r : results) {
      if (r.point.a != s.a || r.point.theta0 != s.theta0 || !r.verdict) continue;
      curve.emplace_back(r.point.k, r.verdict->fitted_exponent());
      if (r.verdict->verdict == Verdict::embedded_eigenvalue) {
        s.last_embedded = std::max(s.last_embedded.value_or(r.point.k), r.point.k);
      }
      if (r.verdict->verdict == Verdict::not_eigenvalue) {
        s.first_not = std::min(s.first_not.value_or(r.point.k), r.point.k);
      }
    }
    s.flip_k = flip_k(std::move(curve));
  }
  return out;
}

Json summary_json(const std::vector<FlipSummary>& summaries) {
  Json list = Json::array();
  for (const auto& s : summaries) {
    Json j;
    j["a"] = s.a;
    j["theta0"] = s.theta0;
    const double predicted = 2.0 * s.a / std::numbers::pi;
    j["predicted_flip_k"] = predicted;
    j["flip_k"] = s.flip_k ? Json(*s.flip_k) : Json(nullptr);
    j["relative_deviation"] = s.flip_k && predicted > 0.0 ? Json((*s.flip_k - predicted) / predicted) : Json(nullptr);
    j["last_embedded_k"] = s.last_embedded ? Json(*s.last_embedded) : Json(nullptr);
    j["first_not_eigenvalue_k"] = s.first_not ? Json(*s.first_not) : Json(nullptr);
    list.push_back(j);
  }
  Json out;
  out["summary"] = list;
  return out;
}

struct ScanCommand {
  SweepOptions sweep;
  std::string output = "scan.jsonl";

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("threshold-scan", "verdicts over a grid in (a, k, theta0), plus the flip point per a");
    sweep.add_to(*cmd);
    cmd->add_option("--output", output, "JSON-lines file name in --out-dir")->capture_default_str();
  }

  int run(const GlobalOptions& g) const {
    const auto points = sweep.points();
    const auto results = run_sweep(points, g.config(), sweep.x_end, g.workers, false);
    std::string lines;
    for (const auto& r : results) lines += result_json(r).dump() + "\n";
    const auto summary = summary_json(summarize(results)).dump() + "\n";
    write_text(g.out(output), lines);
    auto summary_name = fs::path(output).stem().string() + ".summary.json";
    write_text(g.out(summary_name), summary);
    std::cout << lines << summary;
    return kExitOk;
  }
};

struct SweepCommand {
  SweepOptions sweep;
  std::string prefix = "sweep";

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("sweep", "integrate every grid point, writing trajectories and verdicts");
    sweep.add_to(*cmd);
    cmd->add_option("--prefix", prefix, "file name prefix in --out-dir")->capture_default_str();
  }

  int run(const GlobalOptions& g) const {
    const auto points = sweep.points();
    const auto results = run_sweep(points, g.config(), sweep.x_end, g.workers, true);
    std::string lines;
    int status = kExitOk;
    for (std::size_t i = 0; i < results.size(); ++i) {
      auto j = result_json(results[i]);
      if (results[i].trajectory) {
        char name[64];
        std::snprintf(name, sizeof name, "%s_%04zu.csv", prefix.c_str(), i);
        export_trajectory(g.out(name), *results[i].trajectory);
        j["trajectory"] = name;
      } else {
        status = kExitFailure;
      }
      lines += j.dump() + "\n";
    }
    write_text(g.out(prefix + ".jsonl"), lines);
    std::cout << lines;
    return status;
  }
};

// ---- verify -----------------------------------------------------------------

struct VerifyCommand {
  PotentialOptions pot;
  EnergyOptions energy;
  double theta0 = IntegratorConfig{}.theta0;
  double x_end = 1e3;
  std::optional<double> step;
  bool via_table = false;
  std::string trajectory;
  std::string profile = "auto";
  std::string output = "verify.json";

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("verify", "cross-check the Pruefer pipeline against direct integration of u");
    pot.add_to(*cmd);
    energy.add_to(*cmd);
    cmd->add_option("--theta0", theta0, "initial angle")->capture_default_str();
    cmd->add_option("--x-end", x_end, "end of the checked interval")->capture_default_str();
    cmd->add_option("--step", step, "direct-integration step (default min(1e-3, pi/(20k)))");
    cmd->add_flag("--via-table", via_table, "feedback: check through the exported table");
    cmd->add_option("--trajectory", trajectory, "check an existing trajectory file instead of integrating");
    cmd->add_option("--profile", profile, "auto | exact | smooth | table")
        ->check(CLI::IsMember({"auto", "exact", "smooth", "table"}))
        ->capture_default_str();
    cmd->add_option("--output", output, "report file name in --out-dir")->capture_default_str();
  }

  int run(const GlobalOptions& g) const {
    Trajectory traj;
    if (!trajectory.empty()) {
      traj = import_trajectory(trajectory);
    } else {
      auto cfg = g.config();
      cfg.k = energy.value();
      cfg.theta0 = theta0;
      cfg.x_end = x_end;
      traj = integrate(pot.spec(), cfg);
    }
    if (traj.truncated()) {
      std::cerr << "error: " << traj.message << '\n';
      return kExitFailure;
    }
    const double k = traj.config.k;
    PotentialSpec oracle_spec = traj.potential;
    if (traj.potential.is_feedback()) {
      if (!via_table && trajectory.empty()) {
        throw UsageError("the feedback potential can only be checked --via-table");
      }
      oracle_spec = PotentialSpec::tabulated(make_feedback_table(traj).table);
    }
    const double h = step.value_or(std::min(1e-3, std::numbers::pi / (20.0 * k)));
    const auto w0 = to_wavefunction({0.0, traj.config.theta0, 0.0}, k);
    WaveOutput out;
    for (const auto& s : traj.samples) out.points.push_back(s.x);
    const auto wave = integrate_direct(oracle_spec, k, w0.u, w0.u_prime, traj.x_reached, h, out);

    std::string name = profile;
    if (name == "auto") {
      const auto kind = traj.potential.kind();
      name = kind == PotentialKind::zero ? "exact"
             : (kind == PotentialKind::feedback_sign || kind == PotentialKind::tabulated) ? "table"
                                                                                          : "smooth";
    }
    const auto d = cross_check(traj, wave, k, ToleranceProfile::named(name));
    const auto text = to_json(d).dump() + "\n";
    write_text(g.out(output), text);
    std::cout << text;
    return d.pass ? kExitOk : kExitFailure;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pruefer-angle tools for embedded eigenvalues of half-line Schroedinger operators"};
  app.set_config("--config", "",
                 "flat key=value file; keys are long option names, subcommand options are written "
                 "<subcommand>.<option> (e.g. integrate.k=0.5). Flags override the file, the file overrides defaults.");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--out-dir", g.out_dir, "directory for output files")->capture_default_str();
  app.add_option("--workers", g.workers, "parallel workers for sweeps")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--rel-tol", g.rel_tol, "integrator relative tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--abs-tol", g.abs_tol, "integrator absolute tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--samples", g.samples, "log-spaced output samples on [1, x_end]")->capture_default_str();
  app.add_option("--seed", g.seed, "reserved; all algorithms are deterministic")->capture_default_str();

  IntegrateCommand integrate_cmd;
  SynthesizeCommand synthesize_cmd;
  FitCommand fit_cmd;
  ScanCommand scan_cmd;
  VerifyCommand verify_cmd;
  SweepCommand sweep_cmd;
  integrate_cmd.add_to(app);
  synthesize_cmd.add_to(app);
  fit_cmd.add_to(app);
  scan_cmd.add_to(app);
  verify_cmd.add_to(app);
  sweep_cmd.add_to(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "integrate") return integrate_cmd.run(g);
    if (name == "synthesize") return synthesize_cmd.run(g);
    if (name == "fit-decay") return fit_cmd.run(g);
    if (name == "threshold-scan") return scan_cmd.run(g);
    if (name == "verify") return verify_cmd.run(g);
    if (name == "sweep") return sweep_cmd.run(g);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
