#pragma once

// Evans function by the compound-matrix method: the 4x4 system acts on
// 2-forms through its second additive compound, the decaying subspaces at
// +-infinity become single 6-vectors, and E(lambda) is their wedge at y = 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qhd/error.hpp"
#include "qhd/linalg.hpp"
#include "qhd/linearize.hpp"
#include "qhd/ode.hpp"
#include "qhd/parallel.hpp"
#include "qhd/profile.hpp"

namespace qhd {

/// Second additive compound in the basis (12, 13, 14, 23, 24, 34).
inline Mat6c compound(const Mat4c& m) {
  const auto M = [&](int i, int j) { return m(i - 1, j - 1); };
  Mat6c b;
  b << M(1, 1) + M(2, 2), M(2, 3), M(2, 4), -M(1, 3), -M(1, 4), 0.0,
       M(3, 2), M(1, 1) + M(3, 3), M(3, 4), M(1, 2), 0.0, -M(1, 4),
       M(4, 2), M(4, 3), M(1, 1) + M(4, 4), 0.0, M(1, 2), M(1, 3),
       -M(3, 1), M(2, 1), 0.0, M(2, 2) + M(3, 3), M(3, 4), -M(2, 4),
       -M(4, 1), 0.0, M(2, 1), M(4, 3), M(2, 2) + M(4, 4), M(2, 3),
       0.0, -M(4, 1), M(3, 1), -M(4, 2), M(3, 2), M(3, 3) + M(4, 4);
  return b;
}

/// u ^ w in the basis (12, 13, 14, 23, 24, 34).
inline Vec6c wedge(const Vec4c& u, const Vec4c& w) {
  Vec6c r;
  r << u[0] * w[1] - u[1] * w[0], u[0] * w[2] - u[2] * w[0], u[0] * w[3] - u[3] * w[0],
       u[1] * w[2] - u[2] * w[1], u[1] * w[3] - u[3] * w[1], u[2] * w[3] - u[3] * w[2];
  return r;
}

/// Coefficient of e1^e2^e3^e4 in a ^ b for 2-forms a, b.
inline cd wedge_pairing(const Vec6c& a, const Vec6c& b) {
  return a[0] * b[5] - a[1] * b[4] + a[2] * b[3] + a[3] * b[2] - a[4] * b[1] + a[5] * b[0];
}

/// Rescales to unit norm with the largest-modulus component real positive.
inline Vec6c fix_phase(const Vec6c& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const cd pivot = v[imax];
  return v * (std::abs(pivot) / pivot) / v.norm();
}

/// Dominant eigen-data of the compound matrix at one end: the wedge of the
/// selected pair of eigenvectors of M (right) and of its inverse rows (left).
struct CompoundEigenpair {
  cd value;  // sum of the selected eigenvalues
  Vec6c right;
  Vec6c left;
  Vec4c spectrum;  // all eigenvalues of M, spectral order

  /// Rank-1 projector onto `right` along the complement annihilated by `left`.
  Vec6c project(const Vec6c& x) const {
    return right * ((left.transpose() * x)(0) / (left.transpose() * right)(0));
  }
};

inline constexpr double kSplittingGap = 1e-8;

/// Selects the two unstable eigenvalues of M- (at -infinity) or the two stable
/// ones of M+ (at +infinity) and checks the 2/2 hyperbolic splitting.
inline CompoundEigenpair asymptotic_eigenpair(cd lambda, const ShockParams& p, EndState end) {
  const SortedEigen4 e = sorted_eigen(m_pm(lambda, p, end).entries);
  for (int i = 0; i < 4; ++i) {
    const bool should_be_unstable = i < 2;
    const double re = e.values[i].real();
    if (std::abs(re) < kSplittingGap || (re > 0.0) != should_be_unstable)
      throw Error(Errc::near_essential_spectrum,
                  "2/2 splitting of M" + std::string(end == EndState::minus ? "-" : "+") +
                      " violated at lambda = " + describe(lambda));
  }
  const int a = end == EndState::minus ? 0 : 2;
  CompoundEigenpair out;
  out.value = e.values[a] + e.values[a + 1];
  out.right = wedge(e.right.col(a), e.right.col(a + 1));
  out.left = wedge(e.left.row(a).transpose(), e.left.row(a + 1).transpose());
  out.spectrum = e.values;
  return out;
}

/// Initial data for the Evans integration at one lambda. The seeds are unit
/// vectors; the analytic frame is scale * r, with the complex factors
/// accumulated by Kato continuation (1 in standalone mode).
struct EvansFrame {
  cd lambda;
  cd mu_minus;
  cd mu_plus;
  Vec6c r_minus;
  Vec6c r_plus;
  cd scale_minus = 1.0;
  cd scale_plus = 1.0;
};

/// Standalone frame with the largest-modulus-real-positive phase convention.
inline EvansFrame asymptotic_frame(cd lambda, const ShockParams& p) {
  const CompoundEigenpair lo = asymptotic_eigenpair(lambda, p, EndState::minus);
  const CompoundEigenpair hi = asymptotic_eigenpair(lambda, p, EndState::plus);
  EvansFrame f;
  f.lambda = lambda;
  f.mu_minus = lo.value;
  f.mu_plus = hi.value;
  f.r_minus = fix_phase(lo.right);
  f.r_plus = fix_phase(hi.right);
  return f;
}

enum class KatoScheme {
  /// r_{k+1} = P_{k+1} r_k only; first order in the node spacing.
  projector,
  /// the same step plus a midpoint correction of the scalar gauge; second order.
  corrected,
};

namespace detail {

// One end of a Kato walk: unit direction u and log of the accumulated factor.
struct KatoState {
  Vec6c u;
  cd log_scale;
};

inline KatoState kato_step(const KatoState& prev, const CompoundEigenpair& from,
                           const CompoundEigenpair& to, KatoScheme scheme, std::size_t k, cd lambda) {
  const Vec6c w = to.project(prev.u);
  const double n = w.norm();
  // a unit vector losing almost all of its length means the eigenspace jumped
  if (!(n > 1e-2))
    throw Error(Errc::contour_crosses_spectrum, "Kato step collapsed at node " + std::to_string(k) +
                                                    " (lambda = " + describe(lambda) +
                                                    "); refine the contour");
  KatoState next{w / n, prev.log_scale + std::log(n)};
  if (scheme == KatoScheme::corrected) {
    // a'/a = l'^T r for the gauge r = a * r_hat, l^T r_hat = 1; midpoint rule
    const cd lw = (from.left.transpose() * w)(0);
    const cd lu = (from.left.transpose() * prev.u)(0);
    next.log_scale += 0.5 * (1.0 - lw / lu);
  }
  return next;
}

}  // namespace detail

/// Kato continuation along ordered nodes: the seed node uses the standalone
/// phase convention and every neighbour is r_{k+1} = P_{k+1} r_k, where P is
/// the rank-1 spectral projector of the compound matrix at that end. The walk
/// runs forward and backward from `seed`.
inline std::vector<EvansFrame> kato_continue(std::span<const cd> nodes, const ShockParams& p,
                                             std::size_t seed = 0,
                                             KatoScheme scheme = KatoScheme::corrected) {
  const std::size_t n = nodes.size();
  std::vector<EvansFrame> frames(n);
  if (n == 0) return frames;
  if (seed >= n) throw Error(Errc::invalid_parameters, "Kato seed index out of range");

  using Pair = std::pair<CompoundEigenpair, CompoundEigenpair>;
  const auto pairs_at = [&](std::size_t k) -> Pair {
    try {
      return {asymptotic_eigenpair(nodes[k], p, EndState::minus),
              asymptotic_eigenpair(nodes[k], p, EndState::plus)};
    } catch (const Error& e) {
      if (e.code() == Errc::near_essential_spectrum)
        throw Error(Errc::contour_crosses_spectrum,
                    "projector rank changes at node " + std::to_string(k) + ": " + e.what());
      throw;
    }
  };

  const Pair seed_pairs = pairs_at(seed);
  const detail::KatoState seed_lo{fix_phase(seed_pairs.first.right), 0.0};
  const detail::KatoState seed_hi{fix_phase(seed_pairs.second.right), 0.0};
  const auto emit = [&](std::size_t k, const Pair& pr, const detail::KatoState& lo,
                        const detail::KatoState& hi) {
    frames[k] = {nodes[k], pr.first.value, pr.second.value, lo.u, hi.u,
                 std::exp(lo.log_scale), std::exp(hi.log_scale)};
  };
  emit(seed, seed_pairs, seed_lo, seed_hi);

  const auto walk = [&](auto next_index, std::size_t steps) {
    Pair prev = seed_pairs;
    detail::KatoState lo = seed_lo, hi = seed_hi;
    std::size_t k = seed;
    for (std::size_t i = 0; i < steps; ++i) {
      k = next_index(k);
      const Pair cur = pairs_at(k);
      lo = detail::kato_step(lo, prev.first, cur.first, scheme, k, nodes[k]);
      hi = detail::kato_step(hi, prev.second, cur.second, scheme, k, nodes[k]);
      emit(k, cur, lo, hi);
      prev = cur;
    }
  };
  walk([](std::size_t k) { return k + 1; }, n - 1 - seed);
  walk([](std::size_t k) { return k - 1; }, seed);
  return frames;
}

struct EvansOptions {
  double L1 = 40.0;
  double rtol = 1e-4;
  double atol = 1e-8;
  /// Force the implicit trapezoidal integrator (normally only a fallback).
  bool force_implicit = false;
  /// Record min/max |phi| along both integrations.
  bool track_norms = false;
  std::size_t explicit_step_budget = 2'000'000;
};

struct EvansValue {
  cd lambda;
  cd E;
  std::size_t steps = 0;
  bool implicit_fallback = false;
  double min_phi = std::numeric_limits<double>::infinity();
  double max_phi = 0.0;
};

namespace detail {

struct HalfRun {
  Vec6c phi;
  std::size_t steps = 0;
  bool implicit = false;
  double min_phi = std::numeric_limits<double>::infinity();
  double max_phi = 0.0;
};

inline HalfRun integrate_half(const ProfileSolution& sol, cd lambda, cd shift, const Vec6c& seed,
                              double from, const EvansOptions& opt) {
  const Mat6c I = Mat6c::Identity();
  const auto shifted = [&](double y) -> Mat6c {
    return compound(mhat(y, lambda, sol).entries) - shift * I;
  };
  HalfRun out;
  out.phi = seed;

  ode::Tolerances tol;
  tol.rtol = opt.rtol;
  tol.atol = opt.atol;
  tol.h_max = opt.L1 / 100.0;
  tol.h_min = opt.L1 * 1e-7;
  tol.max_steps = opt.explicit_step_budget;

  if (!opt.force_implicit) {
    const auto rhs = [&](double y, const Vec6c& u, Vec6c& du) { du.noalias() = shifted(y) * u; };
    ode::Result r;
    if (opt.track_norms) {
      const auto obs = [&](const ode::DenseStep<Vec6c>& st) {
        const double nrm = st(st.t0 + st.h).norm();
        out.min_phi = std::min(out.min_phi, nrm);
        out.max_phi = std::max(out.max_phi, nrm);
        return true;
      };
      r = ode::dopri54(rhs, from, 0.0, out.phi, tol, obs);
    } else {
      r = ode::dopri54(rhs, from, 0.0, out.phi, tol);
    }
    out.steps = r.stats.accepted;
    if (r.status == ode::Status::completed && out.phi.allFinite()) return out;
    // explicit stepping collapsed: restart with the A-stable scheme
    out.phi = seed;
  }
  out.implicit = true;
  tol.max_steps = 10'000'000;
  const ode::Result r = ode::trapezoid_linear(shifted, from, 0.0, out.phi, tol);
  out.steps += r.stats.accepted;
  if (r.status != ode::Status::completed || !out.phi.allFinite())
    throw Error(Errc::integrator_failure,
                "Evans integration failed at lambda = " + describe(lambda));
  if (opt.track_norms) {
    const double nrm = out.phi.norm();
    out.min_phi = std::min(out.min_phi, nrm);
    out.max_phi = std::max(out.max_phi, nrm);
  }
  return out;
}

}  // namespace detail

/// E(lambda): phi- from -L1 to 0 and phi+ from L1 back to 0 under
/// phi' = (B(y, lambda) - mu-+) phi, paired at y = 0.
inline EvansValue evans_eval(cd lambda, const ProfileSolution& sol, const EvansFrame& frame,
                             const EvansOptions& opt = {}) {
  const detail::HalfRun lo =
      detail::integrate_half(sol, lambda, frame.mu_minus, frame.r_minus, -opt.L1, opt);
  const detail::HalfRun hi =
      detail::integrate_half(sol, lambda, frame.mu_plus, frame.r_plus, opt.L1, opt);
  EvansValue v;
  v.lambda = lambda;
  v.E = frame.scale_minus * frame.scale_plus * wedge_pairing(lo.phi, hi.phi);
  v.steps = lo.steps + hi.steps;
  v.implicit_fallback = lo.implicit || hi.implicit;
  v.min_phi = std::min(lo.min_phi, hi.min_phi);
  v.max_phi = std::max(lo.max_phi, hi.max_phi);
  return v;
}

/// E(lambda) with a standalone frame.
inline EvansValue evans_eval(cd lambda, const ProfileSolution& sol, const EvansOptions& opt = {}) {
  return evans_eval(lambda, sol, asymptotic_frame(lambda, sol.params), opt);
}

/// E sampled along an ordered node list.
struct EvansTrace {
  std::vector<cd> nodes;
  std::vector<cd> values;
  std::vector<EvansFrame> frames;
  std::size_t total_steps = 0;
  std::size_t implicit_fallbacks = 0;
  double min_abs = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  double min_phi = std::numeric_limits<double>::infinity();
  double max_phi = 0.0;
};

/// Evaluates E at every frame; nodes are independent once frames exist.
inline EvansTrace evaluate_trace(std::vector<EvansFrame> frames, const ProfileSolution& sol,
                                 const EvansOptions& opt = {}, unsigned workers = 1) {
  EvansTrace t;
  const std::size_t n = frames.size();
  std::vector<EvansValue> vals(n);
  parallel_for(n, workers, [&](std::size_t i) {
    vals[i] = evans_eval(frames[i].lambda, sol, frames[i], opt);
  });
  t.nodes.resize(n);
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.nodes[i] = frames[i].lambda;
    t.values[i] = vals[i].E;
    t.total_steps += vals[i].steps;
    t.implicit_fallbacks += vals[i].implicit_fallback ? 1 : 0;
    const double a = std::abs(vals[i].E);
    t.min_abs = std::min(t.min_abs, a);
    t.max_abs = std::max(t.max_abs, a);
    t.min_phi = std::min(t.min_phi, vals[i].min_phi);
    t.max_phi = std::max(t.max_phi, vals[i].max_phi);
  }
  t.frames = std::move(frames);
  return t;
}

/// max |E(conj z) - conj(E(z))| / |E(z)| over node pairs that are conjugates
/// of each other (matched to 1e-12 relative). Returns -1 without such pairs.
inline double conjugate_symmetry_residual(const EvansTrace& t) {
  double worst = -1.0;
  const std::size_t n = t.nodes.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const auto key = [&](std::size_t i) { return std::pair{t.nodes[i].real(), std::abs(t.nodes[i].imag())}; };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  for (std::size_t a = 0; a + 1 < n; ++a) {
    const std::size_t i = order[a];
    for (std::size_t b = a + 1; b < n; ++b) {
      const std::size_t j = order[b];
      const cd zi = t.nodes[i], zj = t.nodes[j];
      const double tol = 1e-12 * std::max(1.0, std::abs(zi));
      if (std::abs(zj.real() - zi.real()) > tol) break;
      if (zi.imag() == 0.0 || std::abs(zi - std::conj(zj)) > tol) continue;
      const double r = std::abs(t.values[j] - std::conj(t.values[i])) / std::abs(t.values[i]);
      worst = std::max(worst, r);
    }
  }
  return worst;
}

/// max |Im E| / |E| over nodes on the real axis; -1 if there are none.
inline double real_axis_imaginary_ratio(const EvansTrace& t) {
  double worst = -1.0;
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    if (t.nodes[i].imag() == 0.0)
      worst = std::max(worst, std::abs(t.values[i].imag()) / std::abs(t.values[i]));
  return worst;
}

}  // namespace qhd
