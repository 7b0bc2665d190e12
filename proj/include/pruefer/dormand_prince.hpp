#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace pruefer {

/// Dormand-Prince 5(4) embedded pair with Hairer's 4th-order continuous
/// extension. Stateless; a `Step` carries everything needed for dense output.
template <std::size_t N>
class DormandPrince {
 public:
  using State = std::array<double, N>;

  struct Step {
    double x0 = 0.0;
    double h = 0.0;
    State y0{};
    State y1{};
    State error{};
    State f1{};  // f(x0 + h, y1), reusable as the next step's first stage
    std::array<State, 5> dense{};
  };

  /// One trial step of size h from (x0, y0). `f0` must equal rhs(x0, y0).
  template <class Rhs>
  [[nodiscard]] Step attempt(Rhs&& rhs, double x0, const State& y0, const State& f0, double h) const {
    Step s;
    s.x0 = x0;
    s.h = h;
    s.y0 = y0;
    const State& k1 = f0;
    const State k2 = rhs(x0 + c2 * h, combine(y0, h, {a21}, {&k1}));
    const State k3 = rhs(x0 + c3 * h, combine(y0, h, {a31, a32}, {&k1, &k2}));
    const State k4 = rhs(x0 + c4 * h, combine(y0, h, {a41, a42, a43}, {&k1, &k2, &k3}));
    const State k5 = rhs(x0 + c5 * h, combine(y0, h, {a51, a52, a53, a54}, {&k1, &k2, &k3, &k4}));
    const State k6 = rhs(x0 + h, combine(y0, h, {a61, a62, a63, a64, a65}, {&k1, &k2, &k3, &k4, &k5}));
    s.y1 = combine(y0, h, {a71, 0.0, a73, a74, a75, a76}, {&k1, &k2, &k3, &k4, &k5, &k6});
    const State k7 = rhs(x0 + h, s.y1);
    s.f1 = k7;

    for (std::size_t i = 0; i < N; ++i) {
      s.error[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double ydiff = s.y1[i] - y0[i];
      const double bspl = h * k1[i] - ydiff;
      s.dense[0][i] = y0[i];
      s.dense[1][i] = ydiff;
      s.dense[2][i] = bspl;
      s.dense[3][i] = ydiff - h * k7[i] - bspl;
      s.dense[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    return s;
  }

  /// Continuous extension inside an accepted step.
  [[nodiscard]] static State interpolate(const Step& s, double x) {
    if (x == s.x0) return s.y0;
    if (x == s.x0 + s.h) return s.y1;
    const double t = (x - s.x0) / s.h;
    const double t1 = 1.0 - t;
    State y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = s.dense[0][i] +
             t * (s.dense[1][i] + t1 * (s.dense[2][i] + t * (s.dense[3][i] + t1 * s.dense[4][i])));
    }
    return y;
  }

  [[nodiscard]] static double interpolate(const Step& s, double x, std::size_t component) {
    if (x == s.x0) return s.y0[component];
    if (x == s.x0 + s.h) return s.y1[component];
    const double t = (x - s.x0) / s.h;
    const double t1 = 1.0 - t;
    const std::size_t i = component;
    return s.dense[0][i] +
           t * (s.dense[1][i] + t1 * (s.dense[2][i] + t * (s.dense[3][i] + t1 * s.dense[4][i])));
  }

  static constexpr int order = 5;

 private:
  template <std::size_t M>
  static State combine(const State& y0, double h, const double (&a)[M], const State* const (&k)[M]) {
    State y = y0;
    for (std::size_t j = 0; j < M; ++j) {
      if (a[j] == 0.0) continue;
      for (std::size_t i = 0; i < N; ++i) y[i] += h * a[j] * (*k[j])[i];
    }
    return y;
  }

  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

}  // namespace pruefer
