#pragma once

// Linearization in integrated variables: the first-order system matrix
// V' = M(y, lambda) V with V = [rho, J, rho', rho''], its limits at +-infinity,
// the constant-state dispersion relation and the Fourier-symbol resolvent bound.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "qhd/error.hpp"
#include "qhd/linalg.hpp"
#include "qhd/model.hpp"
#include "qhd/profile.hpp"

namespace qhd {

/// alpha = J^2/P^2 - gamma P^{gamma-1}, beta = s - 2 J / P.
struct AsymptoticCoefficients {
  double alpha;
  double beta;
};

inline AsymptoticCoefficients asymptotic_coefficients(const ShockParams& p, EndState end) {
  const double P = end == EndState::minus ? p.p_minus : p.p_plus;
  const double J = end == EndState::minus ? p.j_minus : p.j_plus;
  return {J * J / (P * P) - p.gamma * std::pow(P, p.gamma - 1.0), p.s - 2.0 * J / P};
}

struct SpectralMatrix {
  Mat4c entries;
  cd lambda;
  double y;  // +-infinity for the asymptotic matrices
};

/// Coefficients c1 = J^2/P^2 - gamma P^{gamma-1} and c2 = s - 2 J / P along the profile.
struct ProfileCoefficients {
  double c1;
  double c2;
};

inline ProfileCoefficients profile_coefficients(const ShockParams& p, double P, double J) {
  const double u = J / P;
  return {u * u - p.gamma * std::pow(P, p.gamma - 1.0), p.s - 2.0 * u};
}

namespace detail {

// Shared by mhat and m_pm so that clamped samples reproduce the limits bit for bit.
inline Mat4c system_matrix(cd lambda, const ShockParams& p, double P, double Q, double J) {
  const auto [c1, c2] = profile_coefficients(p, P, J);
  const double two_k2 = 2.0 / (p.k * p.k);
  const double qp = Q / P;
  Mat4c m = Mat4c::Zero();
  m(0, 2) = 1.0;
  m(1, 0) = -lambda;
  m(1, 2) = p.s;
  m(2, 3) = 1.0;
  m(3, 0) = two_k2 * c2 * lambda;
  m(3, 1) = two_k2 * lambda;
  m(3, 2) = two_k2 * p.mu * lambda - two_k2 * c1 - two_k2 * p.s * c2 - qp * qp;
  m(3, 3) = 2.0 * qp - two_k2 * p.s * p.mu;
  return m;
}

}  // namespace detail

inline SpectralMatrix mhat(double y, cd lambda, const ProfileSolution& sol) {
  const ProfileSample s = sample_profile(sol, y);
  return {detail::system_matrix(lambda, sol.params, s.P, s.Q, s.J), lambda, y};
}

inline SpectralMatrix m_pm(cd lambda, const ShockParams& p, EndState end) {
  const bool minus = end == EndState::minus;
  const double P = minus ? p.p_minus : p.p_plus;
  const double J = minus ? p.j_minus : p.j_plus;
  const double inf = std::numeric_limits<double>::infinity();
  return {detail::system_matrix(lambda, p, P, 0.0, J), lambda, minus ? -inf : inf};
}

/// Constant state (P, J) of the unscaled system; alpha and beta as in L_c (s = 0).
struct ConstantState {
  double P;
  double J;
  double gamma;
  double mu;
  double k;

  double alpha() const { return J * J / (P * P) - gamma * std::pow(P, gamma - 1.0); }
  double beta() const { return -2.0 * J / P; }
  bool subsonic() const { return alpha() < 0.0; }
};

inline ConstantState end_state(const ShockParams& p, EndState end) {
  const bool minus = end == EndState::minus;
  return {minus ? p.p_minus : p.p_plus, minus ? p.j_minus : p.j_plus, p.gamma, p.mu, p.k};
}

/// Roots of lambda^2 + xi (mu xi - i beta) lambda + xi^2 (-alpha + k^2 xi^2 / 2) = 0,
/// ordered by descending real part.
inline std::pair<cd, cd> dispersion_roots(double xi, double alpha, double beta, double mu,
                                          double k) {
  const cd i(0.0, 1.0);
  const cd b = xi * (mu * xi - i * beta);
  const cd c = xi * xi * (-alpha + 0.5 * k * k * xi * xi);
  if (c == 0.0) {
    // one root is zero, the other is -b
    const cd r(0.0, 0.0);
    return spectral_order(r, -b) ? std::pair{r, -b} : std::pair{-b, r};
  }
  const cd d = std::sqrt(b * b - 4.0 * c);
  // pick the sign that avoids cancellation, then use Vieta for the partner
  const cd q = (std::real(std::conj(b) * d) >= 0.0) ? -0.5 * (b + d) : -0.5 * (b - d);
  const cd r1 = q;
  const cd r2 = c / q;
  return spectral_order(r1, r2) ? std::pair{r1, r2} : std::pair{r2, r1};
}

struct EssentialCurves {
  std::vector<double> xi;
  std::vector<cd> lambda1;
  std::vector<cd> lambda2;
  double max_real = -std::numeric_limits<double>::infinity();
  double argmax_xi = 0.0;
};

/// Dispersion curves of the constant state. `frame_speed` moves to the frame
/// y = x - s t, which adds i s xi to every root and leaves real parts alone.
inline EssentialCurves essential_spectrum_curves(const ConstantState& st,
                                                 std::span<const double> xi_grid,
                                                 double frame_speed = 0.0) {
  EssentialCurves out;
  out.xi.assign(xi_grid.begin(), xi_grid.end());
  out.lambda1.reserve(xi_grid.size());
  out.lambda2.reserve(xi_grid.size());
  const double alpha = st.alpha(), beta = st.beta();
  for (double xi : xi_grid) {
    auto [l1, l2] = dispersion_roots(xi, alpha, beta, st.mu, st.k);
    const cd shift(0.0, frame_speed * xi);
    l1 += shift;
    l2 += shift;
    out.lambda1.push_back(l1);
    out.lambda2.push_back(l2);
    const double re = std::max(l1.real(), l2.real());
    if (re > out.max_real) {
      out.max_real = re;
      out.argmax_xi = xi;
    }
  }
  return out;
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

/// 2x2 Fourier symbol of L_c acting on (rho, J).
inline Mat2c constant_state_symbol(const ConstantState& st, double xi) {
  const cd i(0.0, 1.0);
  const double alpha = st.alpha(), beta = st.beta();
  Mat2c S;
  S(0, 0) = 0.0;
  S(0, 1) = -i * xi;
  S(1, 0) = i * alpha * xi - i * (0.5 * st.k * st.k) * xi * xi * xi;
  S(1, 1) = i * beta * xi - st.mu * xi * xi;
  return S;
}

/// Spectral norm of the inverse of a 2x2 matrix: sigma_max / |det|.
inline double inverse_norm_2x2(const Mat2c& m) {
  const double fro2 = m.squaredNorm();
  const double det = std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  if (det == 0.0) return std::numeric_limits<double>::infinity();
  const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
  const double smax = std::sqrt(0.5 * (fro2 + disc));
  return smax / det;
}

struct ResolventAudit {
  cd lambda;
  double sup_norm = 0.0;
  double argsup_xi = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// sup over xi of |(lambda - S(xi))^{-1}| against C / h(Re lambda) with
/// C = max{k^2/2, -alpha, 1} and h = min{-alpha Re, Re, k^2/2 Re, mu}.
/// By Plancherel this is the H^1 resolvent estimate for L_c.
inline ResolventAudit resolvent_symbol_bound(cd lambda, const ConstantState& st,
                                             std::span<const double> xi_grid) {
  const double alpha = st.alpha();
  if (!(alpha < 0.0)) throw Error(Errc::not_subsonic, "constant state is not subsonic");
  const double re = lambda.real();
  if (!(re > 0.0)) throw Error(Errc::invalid_parameters, "resolvent bound needs Re lambda > 0");
  ResolventAudit a;
  a.lambda = lambda;
  const double k2 = 0.5 * st.k * st.k;
  const double C = std::max({k2, -alpha, 1.0});
  const double h = std::min({-alpha * re, re, k2 * re, st.mu});
  a.bound = C / h;
  for (double xi : xi_grid) {
    const Mat2c m = lambda * Mat2c::Identity() - constant_state_symbol(st, xi);
    const double n = inverse_norm_2x2(m);
    if (n > a.sup_norm) {
      a.sup_norm = n;
      a.argsup_xi = xi;
    }
  }
  a.pass = a.sup_norm <= a.bound;
  return a;
}

}  // namespace qhd
