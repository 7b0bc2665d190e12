#pragma once

// JSON renderings of verdicts and oracle discrepancies. Keys keep insertion
// order so repeated runs serialize byte-identically.

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "pruefer/analysis.hpp"
#include "pruefer/error.hpp"
#include "pruefer/oracle.hpp"

namespace pruefer {

using Json = nlohmann::ordered_json;

namespace detail {

/// Non-finite numbers become null rather than invalid JSON.
[[nodiscard]] inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

[[nodiscard]] inline double number_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

[[nodiscard]] inline Json to_json(const DecayFit& f) {
  Json j;
  j["fit_window"] = Json::array({detail::number(f.x_lo), detail::number(f.x_hi)});
  j["exponent"] = detail::number(f.exponent());
  j["slope"] = detail::number(f.slope);
  j["intercept"] = detail::number(f.intercept);
  j["fit_residual"] = detail::number(f.residual_rms);
  j["sample_count"] = f.sample_count;
  return j;
}

[[nodiscard]] inline Json to_json(const EigenvalueVerdict& v) {
  Json j;
  j["a"] = detail::number(v.a);
  j["k"] = detail::number(v.k);
  j["lambda"] = detail::number(v.lambda);
  j["threshold"] = detail::number(v.threshold);
  j["predicted_exponent"] = detail::number(v.predicted_exponent);
  j["fitted_exponent"] = detail::number(v.fitted_exponent());
  j["fit_window"] = Json::array({detail::number(v.fit.x_lo), detail::number(v.fit.x_hi)});
  j["fit_residual"] = detail::number(v.fit.residual_rms);
  j["tail_l2"] = detail::number(v.tail_l2);
  j["verdict"] = to_string(v.verdict);
  j["margin"] = detail::number(v.margin);
  j["margin_floor"] = detail::number(v.margin_floor);
  if (!v.diagnostic.empty()) j["diagnostic"] = v.diagnostic;
  return j;
}

[[nodiscard]] inline Verdict parse_verdict(const std::string& text) {
  for (const auto v : {Verdict::embedded_eigenvalue, Verdict::not_eigenvalue, Verdict::inconclusive}) {
    if (text == to_string(v)) return v;
  }
  throw IoError("unknown verdict '" + text + "'");
}

/// Inverse of to_json for the fields a verdict line carries; the fit keeps
/// only its window, residual and slope.
[[nodiscard]] inline EigenvalueVerdict verdict_from_json(const Json& j) {
  try {
    EigenvalueVerdict v;
    v.a = detail::number_from(j.at("a"));
    v.k = detail::number_from(j.at("k"));
    v.lambda = detail::number_from(j.at("lambda"));
    v.threshold = detail::number_from(j.at("threshold"));
    v.predicted_exponent = detail::number_from(j.at("predicted_exponent"));
    v.fit.slope = -detail::number_from(j.at("fitted_exponent"));
    v.fit.x_lo = detail::number_from(j.at("fit_window").at(0));
    v.fit.x_hi = detail::number_from(j.at("fit_window").at(1));
    v.fit.residual_rms = detail::number_from(j.at("fit_residual"));
    v.tail_l2 = detail::number_from(j.at("tail_l2"));
    v.verdict = parse_verdict(j.at("verdict").get<std::string>());
    v.margin = detail::number_from(j.at("margin"));
    if (j.contains("margin_floor")) v.margin_floor = detail::number_from(j.at("margin_floor"));
    if (j.contains("diagnostic")) v.diagnostic = j.at("diagnostic").get<std::string>();
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("verdict JSON: ") + e.what());
  }
}

[[nodiscard]] inline Json to_json(const Discrepancy& d) {
  Json j;
  j["max_dtheta"] = detail::number(d.max_dtheta);
  j["max_dlogR"] = detail::number(d.max_dlog_r);
  j["x_range"] = Json::array({detail::number(d.x_lo), detail::number(d.x_hi)});
  j["n_points"] = d.n_points;
  j["profile"] = d.profile.name;
  j["tolerance_logR"] = detail::number(d.profile.tolerance);
  j["tolerance_theta"] = detail::number(d.profile.theta_tolerance);
  j["pass"] = d.pass;
  return j;
}

[[nodiscard]] inline Discrepancy discrepancy_from_json(const Json& j) {
  try {
    Discrepancy d;
    d.max_dtheta = detail::number_from(j.at("max_dtheta"));
    d.max_dlog_r = detail::number_from(j.at("max_dlogR"));
    d.x_lo = detail::number_from(j.at("x_range").at(0));
    d.x_hi = detail::number_from(j.at("x_range").at(1));
    d.n_points = j.at("n_points").get<std::size_t>();
    d.profile.name = j.at("profile").get<std::string>();
    d.profile.tolerance = detail::number_from(j.at("tolerance_logR"));
    d.profile.theta_tolerance = detail::number_from(j.at("tolerance_theta"));
    d.pass = j.at("pass").get<bool>();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("discrepancy JSON: ") + e.what());
  }
}

}  // namespace pruefer
