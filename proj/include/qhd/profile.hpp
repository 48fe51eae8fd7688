#pragma once

// Heteroclinic traveling-wave profile: shooting from the saddle [P-, 0] along
// its unstable manifold, re-centering, and uniform resampling.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "qhd/error.hpp"
#include "qhd/model.hpp"
#include "qhd/ode.hpp"

namespace qhd {

enum class EndState { minus, plus };

enum class FixedPointKind { saddle, stable_spiral, stable_node, unstable_spiral, unstable_node };

constexpr const char* to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::saddle: return "saddle";
    case FixedPointKind::stable_spiral: return "stable-spiral";
    case FixedPointKind::stable_node: return "stable-node";
    case FixedPointKind::unstable_spiral: return "unstable-spiral";
    case FixedPointKind::unstable_node: return "unstable-node";
  }
  return "unknown";
}

struct FixedPointAnalysis {
  double P = 0.0;
  std::complex<double> mu1;  // (-b - sqrt(disc)) / 2
  std::complex<double> mu2;  // (-b + sqrt(disc)) / 2
  double discriminant = 0.0;
  double a = 0.0;
  double b = 0.0;
  double slope = 0.0;  // f'(P)
  FixedPointKind kind = FixedPointKind::saddle;
  std::optional<Eigen::Vector2d> v2;  // unit unstable eigenvector, second component < 0
};

/// Eigenstructure of the planar profile system P' = Q, Q' = a f(P) - b Q + Q^2/P
/// at [P, 0] with a = 2/k^2 and b = 2 s mu / k^2.
inline FixedPointAnalysis analyze_fixed_point(const ShockParams& p, EndState end) {
  FixedPointAnalysis fp;
  fp.P = end == EndState::minus ? p.p_minus : p.p_plus;
  fp.a = 2.0 / (p.k * p.k);
  fp.b = 2.0 * p.s * p.mu / (p.k * p.k);
  fp.slope = flux_df(fp.P, p);
  if (fp.slope == 0.0 || std::abs(fp.slope) < 1e-14 * std::abs(p.gamma * std::pow(fp.P, p.gamma - 1)))
    throw Error(Errc::degenerate_fixed_point, "f'(P) vanishes at the end state (sonic point)");
  fp.discriminant = fp.b * fp.b + 4.0 * fp.a * fp.slope;
  const std::complex<double> root = std::sqrt(std::complex<double>(fp.discriminant, 0.0));
  fp.mu1 = 0.5 * (-fp.b - root);
  fp.mu2 = 0.5 * (-fp.b + root);
  if (fp.slope > 0.0) {
    fp.kind = FixedPointKind::saddle;
    // Jacobian [[0, 1], [a f', -b]] has eigenvector (1, mu2) for mu2.
    Eigen::Vector2d v(1.0, fp.mu2.real());
    v = -v / v.norm();
    if (v[1] > 0.0) v = -v;
    fp.v2 = v;
  } else if (fp.discriminant < 0.0) {
    fp.kind = fp.b > 0.0 ? FixedPointKind::stable_spiral : FixedPointKind::unstable_spiral;
  } else {
    fp.kind = fp.b > 0.0 ? FixedPointKind::stable_node : FixedPointKind::unstable_node;
  }
  return fp;
}

struct ProfileOptions {
  double h = 1e-5;
  double L1 = 40.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  std::size_t grid_points = 4001;
  double tolerance = 1e-3;
};

struct ProfileSample {
  double P;
  double Q;
  double J;
};

/// Sampled heteroclinic orbit on the uniform grid [-L1, L1], re-centered so
/// that P(0) is the mean of the end states. Immutable after construction.
struct ProfileSolution {
  ShockParams params;
  double L1 = 0.0;
  double dy = 0.0;
  std::vector<double> y;
  std::vector<double> P;
  std::vector<double> Q;
  std::vector<double> J;
  double convergence_residual = 0.0;
  bool monotone = true;
  std::size_t q_sign_changes = 0;
  double shooting_length = 0.0;  // integrated y-range from the offset start
  double center_shift = 0.0;     // shooting coordinate of y = 0
  FixedPointAnalysis saddle;
  FixedPointAnalysis attractor;
  std::size_t ode_steps = 0;

  std::size_t size() const { return y.size(); }
};

/// Piecewise-linear interpolation; at or beyond +-L1 returns the exact end
/// state (P+-, 0, J+-).
inline ProfileSample sample_profile(const ProfileSolution& sol, double y) {
  const ShockParams& p = sol.params;
  if (y <= -sol.L1) return {p.p_minus, 0.0, p.j_minus};
  if (y >= sol.L1) return {p.p_plus, 0.0, p.j_plus};
  const double x = (y + sol.L1) / sol.dy;
  std::size_t i = static_cast<std::size_t>(x);
  if (i >= sol.size() - 1) i = sol.size() - 2;
  const double w = x - static_cast<double>(i);
  return {sol.P[i] + w * (sol.P[i + 1] - sol.P[i]), sol.Q[i] + w * (sol.Q[i + 1] - sol.Q[i]),
          sol.J[i] + w * (sol.J[i + 1] - sol.J[i])};
}

namespace detail {

inline ShockParams mirrored(const ShockParams& p) {
  ShockParams m = p;
  m.s = -p.s;
  m.A = -p.A;
  m.p_minus = p.p_plus;
  m.p_plus = p.p_minus;
  m.j_minus = -p.j_plus;
  m.j_plus = -p.j_minus;
  return m;
}

inline std::size_t count_sign_changes(const std::vector<double>& q, double floor) {
  std::size_t changes = 0;
  int last = 0;
  for (double v : q) {
    const int sg = v > floor ? 1 : (v < -floor ? -1 : 0);
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++changes;
    last = sg;
  }
  return changes;
}

inline ProfileSolution shoot_forward(const ShockParams& p, const ProfileOptions& opt) {
  using State = Eigen::Vector2d;
  ProfileSolution sol;
  sol.params = p;
  sol.L1 = opt.L1;
  sol.saddle = analyze_fixed_point(p, EndState::minus);
  sol.attractor = analyze_fixed_point(p, EndState::plus);
  if (sol.saddle.kind != FixedPointKind::saddle || !sol.saddle.v2)
    throw Error(Errc::degenerate_fixed_point, "[P-, 0] is not a saddle");

  const double a = sol.saddle.a, b = sol.saddle.b;
  const double gap = p.p_minus - p.p_plus;
  const double mid = 0.5 * (p.p_minus + p.p_plus);
  const double ball = 1e-6 * std::abs(gap);
  const double t_cap = 10.0 * opt.L1;
  const Eigen::Vector2d v2 = *sol.saddle.v2;
  const double rate = sol.saddle.mu2.real();

  const auto rhs = [&](double, const State& u, State& du) {
    if (!(u[0] > 0.0)) {
      du.setConstant(std::numeric_limits<double>::quiet_NaN());
      return;
    }
    du[0] = u[1];
    du[1] = a * flux_f(u[0], p) - b * u[1] + u[1] * u[1] / u[0];
  };

  State u(p.p_minus, 0.0);
  u += opt.h * v2;

  std::vector<ode::DenseStep<State>> steps;
  std::optional<double> t_mid;
  bool blew_up = false;
  const auto observer = [&](const ode::DenseStep<State>& st) {
    steps.push_back(st);
    const State end = st(st.t0 + st.h);
    if (!(end[0] > 0.0) || !end.allFinite()) {
      blew_up = true;
      return false;
    }
    if (!t_mid && (end[0] - mid) * gap <= 0.0) {
      // bisect the crossing on the dense output
      double lo = st.t0, hi = st.t0 + st.h;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (lo + hi);
        if ((st(m)[0] - mid) * gap > 0.0) lo = m; else hi = m;
      }
      t_mid = 0.5 * (lo + hi);
    }
    return std::hypot(end[0] - p.p_plus, end[1]) > ball;
  };

  ode::Tolerances tol;
  tol.rtol = opt.rtol;
  tol.atol = opt.atol;
  tol.h_max = std::min(0.5, opt.L1 / 50.0);
  const ode::Result res = ode::dopri54(rhs, 0.0, t_cap, u, tol, observer);
  sol.ode_steps = res.stats.accepted;
  if (blew_up || res.status == ode::Status::non_finite)
    throw Error(Errc::profile_blow_up, "density left P > 0 during shooting");
  if (res.status == ode::Status::step_collapse || res.status == ode::Status::max_steps)
    throw Error(Errc::integrator_failure, "profile integration did not finish");
  if (!t_mid)
    throw Error(Errc::profile_not_converged,
                "orbit never reached the mid density; try a larger L1");

  const double t_end = res.t;
  sol.shooting_length = t_end;
  sol.center_shift = *t_mid;

  const std::size_t n = opt.grid_points;
  sol.dy = 2.0 * opt.L1 / static_cast<double>(n - 1);
  sol.y.resize(n);
  sol.P.resize(n);
  sol.Q.resize(n);
  sol.J.resize(n);
  const auto state_at = [&](double t) -> State {
    if (t <= 0.0) {
      // linear unstable manifold ahead of the offset start
      return State(p.p_minus, 0.0) + opt.h * std::exp(rate * t) * v2;
    }
    if (t >= t_end) return State(p.p_plus, 0.0);
    auto it = std::upper_bound(steps.begin(), steps.end(), t,
                               [](double v, const ode::DenseStep<State>& s) { return v < s.t0; });
    --it;
    return (*it)(t);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double y = -opt.L1 + sol.dy * static_cast<double>(i);
    const State s = state_at(y + *t_mid);
    sol.y[i] = y;
    sol.P[i] = s[0];
    sol.Q[i] = s[1];
    sol.J[i] = p.s * s[0] - p.A;
  }
  sol.y.back() = opt.L1;

  // an orbit that entered the ball early reports its distance there, not the clamp
  const State terminal = opt.L1 + *t_mid < t_end ? state_at(opt.L1 + *t_mid) : u;
  sol.convergence_residual = std::hypot(terminal[0] - p.p_plus, terminal[1]);
  sol.q_sign_changes = count_sign_changes(sol.Q, 1e-12 * std::abs(gap));
  sol.monotone = sol.q_sign_changes == 0;
  return sol;
}

}  // namespace detail

/// Computes the profile connecting [P-, 0] to [P+, 0].
///
/// For s > 0 the orbit leaves the saddle [P-, 0] along v2; s < 0 is handled
/// by the reflection y -> -y, which swaps the end states and flips s and A.
inline ProfileSolution shoot_profile(const ShockParams& params, const ProfileOptions& opt = {}) {
  if (!(opt.h > 0.0) || !(opt.L1 > 0.0) || opt.grid_points < 3)
    throw Error(Errc::invalid_parameters, "profile options need h > 0, L1 > 0, >= 3 grid points");
  const ExistenceReport ex = check_existence(params);
  if (!ex.criterion_applicable || !ex.profile_exists)
    throw Error(Errc::no_shock, "existence criterion for a profile is not satisfied");

  if (params.s > 0.0) {
    ProfileSolution sol = detail::shoot_forward(params, opt);
    if (sol.convergence_residual > opt.tolerance)
      throw Error(Errc::profile_not_converged,
                  "terminal residual " + std::to_string(sol.convergence_residual) +
                      " exceeds tolerance; try a larger L1");
    return sol;
  }

  ProfileSolution m = detail::shoot_forward(detail::mirrored(params), opt);
  if (m.convergence_residual > opt.tolerance)
    throw Error(Errc::profile_not_converged,
                "terminal residual " + std::to_string(m.convergence_residual) +
                    " exceeds tolerance; try a larger L1");
  ProfileSolution sol = m;
  sol.params = params;
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = n - 1 - i;
    sol.y[i] = -m.y[r];
    sol.P[i] = m.P[r];
    sol.Q[i] = -m.Q[r];
    sol.J[i] = params.s * m.P[r] - params.A;
  }
  sol.saddle = analyze_fixed_point(params, EndState::plus);
  sol.attractor = analyze_fixed_point(params, EndState::minus);
  return sol;
}

}  // namespace qhd
