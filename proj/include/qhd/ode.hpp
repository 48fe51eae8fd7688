#pragma once

// Adaptive Dormand-Prince 5(4) with PI step control and dense output, plus an
// adaptive implicit trapezoidal stepper for linear systems y' = A(t) y.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <utility>

namespace qhd::ode {

struct Tolerances {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_max = std::numeric_limits<double>::infinity();
  double h_init = 0.0;  // 0 selects an automatic initial step
  /// Steps smaller than this end the run with Status::step_collapse.
  double h_min = 0.0;
  std::size_t max_steps = 10'000'000;
};

enum class Status { completed, stopped, step_collapse, max_steps, non_finite };

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  double min_step = std::numeric_limits<double>::infinity();
};

struct Result {
  Status status = Status::completed;
  double t = 0.0;
  Stats stats;
};

namespace dp {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp

/// Continuous extension of one accepted step (4th order).
template <class State>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  State r1, r2, r3, r4, r5;

  State operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
};

/// Observer placeholder; skips assembling dense output.
struct NoObserver {};

namespace detail {

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, double rtol, double atol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = std::abs(err[i]) / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace detail

/// Integrates u' = rhs(t, u) from t0 to t1 (either direction) in place.
///
/// `rhs(t, u, du)` fills du. After each accepted step `observer(step)` is
/// called with the dense step; returning false stops the run.
template <class State, class Rhs, class Observer>
Result dopri54(Rhs&& rhs, double t0, double t1, State& u, const Tolerances& tol,
               Observer&& observer) {
  using namespace dp;
  constexpr double safe = 0.9, facl = 0.2, facr = 10.0, beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;

  Result res;
  res.t = t0;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  if (span == 0.0) return res;
  const double h_max = std::min(tol.h_max, span);

  State k1 = u, k2 = u, k3 = u, k4 = u, k5 = u, k6 = u, k7 = u, y1 = u, ys = u, err = u;
  double t = t0;
  rhs(t, u, k1);
  ++res.stats.evaluations;

  double h = tol.h_init;
  if (h <= 0.0) {
    // Hairer's starting step heuristic.
    double dnf = 0.0, dny = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double sk = tol.atol + tol.rtol * std::abs(u[i]);
      dnf += std::norm(k1[i]) / (sk * sk);
      dny += std::norm(u[i]) / (sk * sk);
    }
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, h_max);
    y1 = u + (dir * h) * k1;
    rhs(t + dir * h, y1, k2);
    ++res.stats.evaluations;
    double der2 = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double sk = tol.atol + tol.rtol * std::abs(u[i]);
      der2 += std::norm(k2[i] - k1[i]) / (sk * sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    h = std::min({100.0 * h, h1, h_max});
  }
  h = std::min(h, h_max);

  double facold = 1e-4;
  bool reject = false;
  while (true) {
    if (res.stats.accepted + res.stats.rejected >= tol.max_steps) {
      res.status = Status::max_steps;
      break;
    }
    const double remaining = (t1 - t) * dir;
    bool last = false;
    if (h >= remaining * 0.999999) {
      h = remaining;
      last = true;
    }
    if (h < tol.h_min && !last) {
      res.status = Status::step_collapse;
      break;
    }
    if (h <= std::abs(t) * std::numeric_limits<double>::epsilon() * 10.0) {
      res.status = Status::step_collapse;
      break;
    }
    const double hs = dir * h;

    y1 = u + hs * (a21 * k1);
    rhs(t + c2 * hs, y1, k2);
    y1 = u + hs * (a31 * k1 + a32 * k2);
    rhs(t + c3 * hs, y1, k3);
    y1 = u + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * hs, y1, k4);
    y1 = u + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * hs, y1, k5);
    ys = u + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + hs, ys, k6);
    y1 = u + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + hs, y1, k7);
    res.stats.evaluations += 6;

    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double e = detail::error_norm(err, u, y1, tol.rtol, tol.atol);
    if (!std::isfinite(e)) {
      if (h <= tol.h_min) {
        res.status = Status::non_finite;
        break;
      }
      h *= facl;
      reject = true;
      ++res.stats.rejected;
      continue;
    }
    const double fac11 = std::pow(e, expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::clamp(fac / safe, 1.0 / facr, 1.0 / facl);
    double h_new = h / fac;

    if (e > 1.0) {
      h /= std::min(1.0 / facl, fac11 / safe);
      reject = true;
      ++res.stats.rejected;
      continue;
    }

    facold = std::max(e, 1e-4);
    ++res.stats.accepted;
    res.stats.min_step = std::min(res.stats.min_step, h);

    constexpr bool observed = !std::is_same_v<std::decay_t<Observer>, NoObserver>;
    DenseStep<State> step;
    if constexpr (observed) {
      step.t0 = t;
      step.h = hs;
      step.r1 = u;
      step.r2 = y1 - u;
      step.r3 = hs * k1 - step.r2;
      step.r4 = step.r2 - hs * k7 - step.r3;
      step.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    }

    u = y1;
    k1 = k7;
    t = last ? t1 : t + hs;
    res.t = t;
    if (reject) {
      h_new = std::min(h_new, h);
      reject = false;
    }
    h = std::min(h_new, h_max);

    if constexpr (observed) {
      if (!observer(step)) {
        res.status = Status::stopped;
        break;
      }
    }
    if (last) {
      res.status = Status::completed;
      break;
    }
  }
  return res;
}

template <class State, class Rhs>
Result dopri54(Rhs&& rhs, double t0, double t1, State& u, const Tolerances& tol) {
  return dopri54(std::forward<Rhs>(rhs), t0, t1, u, tol, NoObserver{});
}

/// Adaptive implicit trapezoidal rule for u' = A(t) u; A-stable, used when
/// explicit steps collapse on stiff problems. The error estimate compares one
/// full step against two half steps.
template <class Vector, class MatrixAt>
Result trapezoid_linear(MatrixAt&& matrix_at, double t0, double t1, Vector& u,
                        const Tolerances& tol) {
  using Matrix = decltype(matrix_at(t0));
  Result res;
  res.t = t0;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  if (span == 0.0) return res;
  const double h_max = std::min(tol.h_max, span);
  double h = tol.h_init > 0.0 ? std::min(tol.h_init, h_max) : h_max * 1e-3;

  const auto step = [](double hs, const Matrix& Aa, const Matrix& Ab, const Vector& ua) {
    const Matrix I = Matrix::Identity(Aa.rows(), Aa.cols());
    const Matrix lhs = I - (0.5 * hs) * Ab;
    const Vector rhs = ua + (0.5 * hs) * (Aa * ua);
    return Vector(lhs.partialPivLu().solve(rhs));
  };

  double t = t0;
  Matrix At = matrix_at(t);
  while (true) {
    if (res.stats.accepted + res.stats.rejected >= tol.max_steps) {
      res.status = Status::max_steps;
      break;
    }
    const double remaining = (t1 - t) * dir;
    bool last = false;
    if (h >= remaining * 0.999999) {
      h = remaining;
      last = true;
    }
    if (h < std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)) * 10.0) {
      res.status = Status::step_collapse;
      break;
    }
    const double hs = dir * h;
    const Matrix Amid = matrix_at(t + 0.5 * hs);
    const Matrix Aend = matrix_at(t + hs);
    res.stats.evaluations += 2;
    const Vector full = step(hs, At, Aend, u);
    const Vector half = step(0.5 * hs, At, Amid, u);
    const Vector two = step(0.5 * hs, Amid, Aend, half);
    // Richardson: the trapezoid error is second order.
    const Vector diff = (two - full) / 3.0;
    const double e = detail::error_norm(diff, u, two, tol.rtol, tol.atol);
    const double fac = std::clamp(0.9 * std::pow(std::max(e, 1e-12), -1.0 / 3.0), 0.2, 5.0);
    if (!std::isfinite(e) || e > 1.0) {
      h *= std::isfinite(e) ? fac : 0.2;
      ++res.stats.rejected;
      continue;
    }
    ++res.stats.accepted;
    res.stats.min_step = std::min(res.stats.min_step, h);
    u = two + diff;
    t = last ? t1 : t + hs;
    res.t = t;
    At = Aend;
    if (last) break;
    h = std::min(h * fac, h_max);
  }
  return res;
}

}  // namespace qhd::ode
