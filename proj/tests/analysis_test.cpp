#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "pruefer/analysis.hpp"

using namespace pruefer;

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

Trajectory run(const PotentialSpec& spec, double k, double x_end, double theta0 = std::numbers::pi / 4.0) {
  IntegratorConfig cfg;
  cfg.k = k;
  cfg.theta0 = theta0;
  cfg.x_end = x_end;
  return integrate(spec, cfg);
}

Trajectory feedback(double k, double x_end = 1e6) { return run(PotentialSpec::feedback_sign(1.0), k, x_end); }

}  // namespace

TEST(FitDecay, RecoversExactLine) {
  std::vector<double> xs;
  std::vector<double> ls;
  for (int i = 0; i <= 400; ++i) {
    const double x = std::pow(10.0, 3.0 + 3.0 * i / 400.0);
    xs.push_back(x);
    ls.push_back(-0.5 * std::log(x) + 3.0);
  }
  const auto fit = fit_log_log(xs, ls, {1e3, 1e6});
  EXPECT_NEAR(fit.exponent(), 0.5, 1e-12);
  EXPECT_NEAR(fit.intercept, 3.0, 1e-12);
  EXPECT_LT(fit.residual_rms, 1e-12);
  EXPECT_EQ(fit.sample_count, 401u);
}

TEST(FitDecay, RandomLinesRecovered) {
  for (int trial = 0; trial < 20; ++trial) {
    const double slope = -2.0 + 0.2 * trial;
    const double icept = 5.0 - 0.5 * trial;
    std::vector<double> xs;
    std::vector<double> ls;
    for (int i = 0; i < 100; ++i) {
      const double x = std::exp(1.0 + 0.1 * i + 0.01 * trial);
      xs.push_back(x);
      ls.push_back(slope * std::log(x) + icept);
    }
    const auto fit = fit_log_log(xs, ls, {1.0, 1e6});
    EXPECT_NEAR(fit.slope, slope, 1e-12);
    EXPECT_NEAR(fit.intercept, icept, 1e-11);
  }
}

TEST(FitDecay, ZeroPotentialHasNoDecay) {
  const auto traj = run(PotentialSpec::zero(), 1.0, 1e4);
  const auto fit = fit_decay(traj, {10.0, 1e4});
  EXPECT_NEAR(fit.exponent(), 0.0, 1e-9);
}

TEST(FitDecay, FeedbackExponent) {
  const auto traj = feedback(0.5);
  const auto fit = fit_decay(traj, {1e3, 1e6});
  EXPECT_NEAR(fit.exponent(), kTwoOverPi, 0.01);
}

TEST(FitDecay, Errors) {
  std::vector<double> xs(10, 2.0);
  std::vector<double> ls(10, 0.0);
  EXPECT_THROW((void)fit_log_log(xs, ls, {1e3, 1e6}), DomainError);
  EXPECT_THROW((void)fit_log_log(xs, ls, {0.5, 1e6}), DomainError);
  EXPECT_THROW((void)fit_log_log(xs, ls, {1e3, 5e3}), DomainError);
  std::vector<double> shorter(9, 0.0);
  EXPECT_THROW((void)fit_log_log(xs, shorter, {1.0, 1e6}), DomainError);
  const auto traj = run(PotentialSpec::zero(), 1.0, 100.0);
  EXPECT_THROW((void)fit_decay(traj, {1.0, 1e3}), DomainError);
}

TEST(WeightedSin, ZeroPotentialMatchesClosedForm) {
  const double k = 1.0;
  const double theta0 = 0.3;
  const auto traj = run(PotentialSpec::zero(), k, 1e4, theta0);
  // |sin 2(theta0 + y)| / (1+y) by composite Simpson on each smooth piece
  // between the kinks at theta0 + y = m pi/2
  const auto reference = [&](double x0, double x) {
    const auto simpson = [&](double a, double b) {
      const int n = 200;
      const double h = (b - a) / n;
      double s = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double y = a + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * std::abs(std::sin(2.0 * (theta0 + k * y))) / (1.0 + y);
      }
      return s * h / 3.0;
    };
    double total = 0.0;
    double a = x0;
    for (double m = std::floor((theta0 + k * x0) / (std::numbers::pi / 2.0)) + 1.0;; m += 1.0) {
      const double kink = (m * std::numbers::pi / 2.0 - theta0) / k;
      const double b = std::min(kink, x);
      total += simpson(a, b);
      if (b >= x) break;
      a = b;
    }
    return total;
  };
  for (const double x : {10.0, 137.5, 1000.0}) {
    const auto q = weighted_sin_integral(traj, 1.0, x);
    EXPECT_NEAR(q.value, reference(1.0, x), 1e-8) << "x = " << x;
    EXPECT_LT(q.error_estimate, 1e-8);
  }
}

TEST(WeightedSin, RatioApproachesTwoOverPi) {
  for (const auto& traj : {run(PotentialSpec::zero(), 1.0, 1e6), feedback(0.5)}) {
    const double w4 = weighted_sin_integral(traj, 1.0, 1e4).value / std::log(1e4);
    const double w5 = weighted_sin_integral(traj, 1.0, 1e5).value / std::log(1e5);
    const double w6 = weighted_sin_integral(traj, 1.0, 1e6).value / std::log(1e6);
    // the O(1) offset fades like 1/ln x, so the ratio creeps toward 2/pi
    EXPECT_LT(std::abs(w5 - kTwoOverPi), std::abs(w4 - kTwoOverPi));
    EXPECT_LT(std::abs(w6 - kTwoOverPi), std::abs(w5 - kTwoOverPi));
    // the increment over the last two decades carries no offset
    const double slope = weighted_sin_integral(traj, 1e4, 1e6).value / std::log(100.0);
    EXPECT_NEAR(slope, kTwoOverPi, 0.02);
  }
}

TEST(WeightedSin, FeedbackDecayIdentity) {
  const double a = 1.0;
  const double k = 0.5;
  const auto traj = feedback(k, 1e5);
  const auto& s = traj.samples;
  for (std::size_t i = 0; i < s.size(); i += 37) {
    if (s[i].x < 1.0) continue;
    const auto q = weighted_sin_integral(traj, s[i].x, s.back().x);
    EXPECT_NEAR(s.back().log_r - s[i].log_r, -(a / (2.0 * k)) * q.value, 1e-7) << "x = " << s[i].x;
  }
}

TEST(WeightedSin, Errors) {
  const auto traj = run(PotentialSpec::zero(), 1.0, 100.0);
  EXPECT_THROW((void)weighted_sin_integral(traj, 0.5, 10.0), DomainError);
  EXPECT_THROW((void)weighted_sin_integral(traj, 10.0, 5.0), DomainError);
  EXPECT_THROW((void)weighted_sin_integral(traj, 1.0, 1e3), DomainError);
}

TEST(WeightedSin, SparseNodesRejected) {
  auto traj = run(PotentialSpec::zero(), 1.0, 1e5);
  traj.crossings.clear();
  // the stored samples alone are far apart near x = 5e4
  EXPECT_THROW((void)weighted_sin_integral(traj, 1.0, 5e4), DomainError);
}

TEST(PerPeriod, ZeroPotential) {
  for (const double k : {1.0, 2.0}) {
    const auto traj = run(PotentialSpec::zero(), k, 100.0);
    for (std::size_t i = 1; i + 1 < traj.crossings.size(); i += 7) {
      const auto p = per_period_integral(traj, i);
      EXPECT_NEAR(p.value, 1.0 / k, 1e-9) << "k = " << k << " i = " << i;
      EXPECT_NEAR(p.deviation, 0.0, 1e-9);
    }
  }
}

TEST(PerPeriod, FeedbackDeviationShrinks) {
  const double k = 0.5;
  const auto traj = feedback(k, 5e3);
  ASSERT_GT(traj.crossings.size(), 1000u);
  double c = 0.0;
  for (std::size_t i = 10; i <= 100; ++i) c = std::max(c, std::abs(per_period_integral(traj, i).deviation) * (1.0 + i));
  EXPECT_TRUE(std::isfinite(c));
  for (std::size_t i = 100; i <= 1000; ++i) {
    EXPECT_LE(std::abs(per_period_integral(traj, i).deviation), c / (1.0 + i)) << "i = " << i;
  }
}

TEST(PerPeriod, MissingCrossings) {
  const auto traj = run(PotentialSpec::zero(), 1.0, 10.0);
  EXPECT_THROW((void)per_period_integral(traj, 0), DomainError);
  EXPECT_THROW((void)per_period_integral(traj, traj.crossings.size()), DomainError);
}

TEST(Bound, Examples) {
  EXPECT_EQ(max_eigenvalue_bound(0.0), 0.0);
  EXPECT_NEAR(max_eigenvalue_bound(std::numbers::pi / 2.0), 1.0, 1e-15);
  EXPECT_NEAR(max_eigenvalue_bound(1.0), 0.405285, 1e-6);
  EXPECT_THROW((void)max_eigenvalue_bound(-1.0), DomainError);
}

TEST(Bound, MonotoneAndQuadratic) {
  double previous = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double a = 0.05 * i;
    const double b = max_eigenvalue_bound(a);
    EXPECT_GT(b, previous);
    EXPECT_EQ(max_eigenvalue_bound(2.0 * a), 4.0 * b);
    previous = b;
  }
}

TEST(Verdict, FeedbackBelowThreshold) {
  const auto v = verdict(feedback(0.5), 1.0, 0.5);
  EXPECT_EQ(v.verdict, Verdict::embedded_eigenvalue);
  EXPECT_NEAR(v.fitted_exponent(), kTwoOverPi, 0.01);
  EXPECT_NEAR(v.threshold, 4.0 / (std::numbers::pi * std::numbers::pi), 1e-15);
  EXPECT_DOUBLE_EQ(v.lambda, 0.25);
  EXPECT_GT(v.fitted_exponent(), 0.5 + v.margin_floor);
  EXPECT_TRUE(std::isfinite(v.tail_l2));
  EXPECT_GT(v.tail_l2, 0.0);
}

TEST(Verdict, FeedbackAboveThreshold) {
  const auto v = verdict(feedback(0.7), 1.0, 0.7);
  EXPECT_EQ(v.verdict, Verdict::not_eigenvalue);
  EXPECT_NEAR(v.fitted_exponent(), 1.0 / (0.7 * std::numbers::pi), 0.01);
  EXPECT_LT(v.fitted_exponent(), 0.5 - v.margin_floor);
}

TEST(Verdict, ZeroPotential) {
  for (const double k : {0.3, 1.0, 2.5}) {
    const auto v = verdict(run(PotentialSpec::zero(), k, 1e5), 0.0, k);
    EXPECT_EQ(v.verdict, Verdict::not_eigenvalue);
    EXPECT_NEAR(v.fitted_exponent(), 0.0, 1e-9);
  }
}

TEST(Verdict, RefusesAboveBound) {
  // a decaying trajectory judged against a = 0.5 at lambda = 0.25 > 1/pi^2
  const auto v = verdict(feedback(0.5, 1e5), 0.5, 0.5);
  EXPECT_EQ(v.verdict, Verdict::inconclusive);
  EXPECT_FALSE(v.diagnostic.empty());
}

TEST(Verdict, InvariantsHold) {
  for (const double k : {0.55, 0.62, 0.65, 0.75}) {
    const auto v = verdict(feedback(k, 1e5), 1.0, k);
    const double p = v.fitted_exponent();
    if (v.verdict == Verdict::embedded_eigenvalue) {
      EXPECT_GT(p, 0.5 + v.margin_floor);
    }
    if (v.verdict == Verdict::not_eigenvalue) {
      EXPECT_LT(p, 0.5 - v.margin_floor);
    }
    if (v.verdict == Verdict::inconclusive) {
      EXPECT_LE(std::abs(p - 0.5), v.margin_floor + 1e-15);
    }
    EXPECT_GE(v.margin_floor, 0.02);
  }
}

TEST(Verdict, Errors) {
  auto short_traj = run(PotentialSpec::zero(), 1.0, 50.0);
  EXPECT_THROW((void)verdict(short_traj, 0.0, 1.0), DomainError);
  auto traj = run(PotentialSpec::zero(), 1.0, 1e3);
  traj.status = Termination::truncated;
  EXPECT_THROW((void)verdict(traj, 0.0, 1.0), NumericalError);
}

TEST(LowerEnvelope, FeedbackBounded) {
  const auto check = lower_envelope_check(feedback(0.5), 1.0, 0.5);
  EXPECT_LE(check.range(), 1.0);
  EXPECT_TRUE(check.bounded);
  EXPECT_NEAR(check.trend, 0.0, 0.02);
}

TEST(LowerEnvelope, ZeroPotentialIsFlat) {
  const auto check = lower_envelope_check(run(PotentialSpec::zero(), 1.0, 1e5), 0.0, 1.0);
  EXPECT_NEAR(check.min, 0.0, 1e-9);
  EXPECT_NEAR(check.max, 0.0, 1e-9);
}

TEST(LowerEnvelope, CoulombBoundedBelow) {
  const auto check = lower_envelope_check(run(PotentialSpec::coulomb_sign(1.0, 1), 0.8, 1e5), 1.0, 0.8);
  EXPECT_TRUE(std::isfinite(check.min));
  EXPECT_GT(check.min, -5.0);
}

TEST(LowerEnvelope, NeedsThreeDecades) {
  EXPECT_THROW((void)lower_envelope_check(run(PotentialSpec::zero(), 1.0, 1e4), 0.0, 1.0, 100.0), DomainError);
}

TEST(FlipK, LinearInInverseK) {
  // p = a/(k pi) crosses 1/2 at exactly 2a/pi
  const double a = 1.3;
  std::vector<std::pair<double, double>> curve;
  for (const double k : {1.2, 0.7, 0.8, 0.9, 1.0}) curve.emplace_back(k, a / (k * std::numbers::pi));
  const auto k = flip_k(curve);
  ASSERT_TRUE(k.has_value());
  EXPECT_NEAR(*k, 2.0 * a / std::numbers::pi, 1e-14);
}

TEST(FlipK, NoCrossing) {
  EXPECT_FALSE(flip_k({{0.5, 0.6}, {0.6, 0.55}}).has_value());
  EXPECT_FALSE(flip_k({}).has_value());
}
