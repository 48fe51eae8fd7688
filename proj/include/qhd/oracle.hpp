#pragma once

// Independent spectral check: finite-difference discretization of the
// integrated-variable eigenproblem
//   lambda rho = s rho' - J'
//   lambda J   = c1 rho' + c2 J' + mu J'' + (k^2/2) rho''' - 2 k^2 (sqrt P)' (rho'/sqrt P)'
// on [-L, L] and a dense eigensolve.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "qhd/contour.hpp"
#include "qhd/dense_eigen.hpp"
#include "qhd/error.hpp"
#include "qhd/linalg.hpp"
#include "qhd/linearize.hpp"
#include "qhd/profile.hpp"

namespace qhd {

enum class Boundary { dirichlet, periodic };

/// Coefficient samples at the N unknown positions.
struct OracleCoefficients {
  double s = 0.0;
  double mu = 1.0;
  double k = 1.0;
  std::vector<double> x;
  std::vector<double> c1;
  std::vector<double> c2;
  std::vector<double> q_over_p;  // P'/P
};

/// Real 2N x 2N matrix acting on [rho_0..rho_{N-1}, J_0..J_{N-1}].
struct DiscretizedOperator {
  std::size_t N = 0;
  double L = 0.0;
  double h = 0.0;
  Boundary boundary = Boundary::dirichlet;
  Eigen::MatrixXd matrix;
};

inline std::vector<double> oracle_grid(std::size_t N, double L, Boundary b) {
  std::vector<double> x(N);
  // Dirichlet: N interior points of N + 1 intervals; periodic: N points of period 2L
  const double h = b == Boundary::dirichlet ? 2.0 * L / static_cast<double>(N + 1)
                                            : 2.0 * L / static_cast<double>(N);
  for (std::size_t j = 0; j < N; ++j)
    x[j] = -L + h * static_cast<double>(b == Boundary::dirichlet ? j + 1 : j);
  return x;
}

inline OracleCoefficients profile_coefficients_on_grid(const ProfileSolution& sol, std::size_t N,
                                                       double L, Boundary b) {
  const ShockParams& p = sol.params;
  OracleCoefficients c;
  c.s = p.s;
  c.mu = p.mu;
  c.k = p.k;
  c.x = oracle_grid(N, L, b);
  for (double x : c.x) {
    const ProfileSample smp = sample_profile(sol, x);
    const ProfileCoefficients pc = profile_coefficients(p, smp.P, smp.J);
    c.c1.push_back(pc.c1);
    c.c2.push_back(pc.c2);
    c.q_over_p.push_back(smp.Q / smp.P);
  }
  return c;
}

/// Coefficients of a constant state (P, J) observed in a frame moving with speed s.
inline OracleCoefficients constant_coefficients(const ConstantState& st, double s, std::size_t N,
                                                double L, Boundary b) {
  OracleCoefficients c;
  c.s = s;
  c.mu = st.mu;
  c.k = st.k;
  c.x = oracle_grid(N, L, b);
  c.c1.assign(N, st.alpha());
  c.c2.assign(N, s + st.beta());
  c.q_over_p.assign(N, 0.0);
  return c;
}

/// Assembles centered second-order stencils; the third derivative uses
/// (-u[j-2] + 2u[j-1] - 2u[j+1] + u[j+2]) / (2h^3). Dirichlet ghosts are zero.
inline DiscretizedOperator assemble(const OracleCoefficients& c, double L, Boundary b) {
  const std::size_t N = c.x.size();
  if (N < 5) throw Error(Errc::size, "oracle grid is narrower than the 5-point stencil");
  DiscretizedOperator op;
  op.N = N;
  op.L = L;
  op.boundary = b;
  op.h = N > 1 ? c.x[1] - c.x[0] : 2.0 * L;
  const double h = op.h;
  const long n = static_cast<long>(N);
  op.matrix = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  auto& A = op.matrix;
  const auto col = [&](long j) -> long {
    if (b == Boundary::periodic) return ((j % n) + n) % n;
    return (j < 0 || j >= n) ? -1 : j;
  };
  // adds w * u[j + off] of block `blk` (0 = rho, 1 = J) to row r
  const auto add = [&](long r, long j, long off, int blk, double w) {
    const long cj = col(j + off);
    if (cj >= 0) A(r, blk * n + cj) += w;
  };
  const double k2 = c.k * c.k;
  for (long j = 0; j < n; ++j) {
    const double d1 = 1.0 / (2.0 * h), d2 = 1.0 / (h * h), d3 = 1.0 / (2.0 * h * h * h);
    // rho rows: s rho' - J'
    add(j, j, 1, 0, c.s * d1);
    add(j, j, -1, 0, -c.s * d1);
    add(j, j, 1, 1, -d1);
    add(j, j, -1, 1, d1);
    // J rows
    const long r = n + j;
    const double qp = c.q_over_p[static_cast<std::size_t>(j)];
    const double rho1 = c.c1[static_cast<std::size_t>(j)] + 0.5 * k2 * qp * qp;  // coefficient of rho'
    const double rho2 = -k2 * qp;                                               // of rho''
    add(r, j, 1, 0, rho1 * d1);
    add(r, j, -1, 0, -rho1 * d1);
    add(r, j, 1, 0, rho2 * d2);
    add(r, j, 0, 0, -2.0 * rho2 * d2);
    add(r, j, -1, 0, rho2 * d2);
    add(r, j, -2, 0, -0.5 * k2 * d3);
    add(r, j, -1, 0, 2.0 * 0.5 * k2 * d3);
    add(r, j, 1, 0, -2.0 * 0.5 * k2 * d3);
    add(r, j, 2, 0, 0.5 * k2 * d3);
    const double c2 = c.c2[static_cast<std::size_t>(j)];
    add(r, j, 1, 1, c2 * d1 + c.mu * d2);
    add(r, j, 0, 1, -2.0 * c.mu * d2);
    add(r, j, -1, 1, -c2 * d1 + c.mu * d2);
  }
  return op;
}

/// Dirichlet discretization on [-L, L] with N interior points.
inline DiscretizedOperator discretize(const ProfileSolution& sol, std::size_t N, double L,
                                      Boundary b = Boundary::dirichlet) {
  if (N < 100) throw Error(Errc::size, "oracle needs N >= 100 grid points");
  if (!(L > 0.0) || L > sol.L1 + 1e-12)
    throw Error(Errc::invalid_parameters, "oracle half-length must lie in (0, L1]");
  return assemble(profile_coefficients_on_grid(sol, N, L, b), L, b);
}

/// Full spectrum in spectral order (descending real part).
inline std::vector<cd> oracle_spectrum(const DiscretizedOperator& op) {
  std::vector<cd> w = dense::eigenvalues(op.matrix);
  std::sort(w.begin(), w.end(), spectral_order);
  return w;
}

inline std::vector<cd> rightmost_eigenvalues(const DiscretizedOperator& op, std::size_t count) {
  if (count > 20) throw Error(Errc::invalid_parameters, "at most 20 rightmost eigenvalues");
  std::vector<cd> w = oracle_spectrum(op);
  w.resize(std::min(count, w.size()));
  return w;
}

/// Largest distance from an eigenvalue to its conjugate partner in the same set.
inline double conjugate_pairing_defect(const std::vector<cd>& w) {
  double worst = 0.0;
  for (const cd& z : w) {
    double best = std::numeric_limits<double>::infinity();
    for (const cd& v : w) best = std::min(best, std::abs(v - std::conj(z)));
    worst = std::max(worst, best / std::max(1.0, std::abs(z)));
  }
  return worst;
}

/// Region enclosed by a closed contour (right half-plane part).
inline bool inside_contour(const Contour& c, cd z) {
  if (!(z.real() > c.imag_offset)) return false;
  const double r = std::abs(z);
  if (r >= c.outer_radius) return false;
  return c.kind != ContourKind::semiannulus || r > c.inner_radius;
}

struct CrossCheckReport {
  bool consistent = true;
  int winding = 0;
  double cutoff = 1e-2;
  std::vector<cd> persistent_unstable;  // Re > cutoff inside the region, stable under N -> 2N
  std::vector<cd> spurious;             // Re > cutoff but moved > 50% under N -> 2N
  std::string summary;
};

/// Winding 0 must come with no persistent oracle eigenvalue of Re > cutoff in
/// the region, and a nonzero winding with at least one.
inline CrossCheckReport cross_check(int winding, const Contour& region, const std::vector<cd>& coarse,
                                    const std::vector<cd>& fine, double cutoff = 1e-2) {
  CrossCheckReport r;
  r.winding = winding;
  r.cutoff = cutoff;
  for (const cd& z : coarse) {
    if (!(z.real() > cutoff) || !inside_contour(region, z)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const cd& w : fine) best = std::min(best, std::abs(w - z));
    if (best <= 0.5 * std::abs(z)) r.persistent_unstable.push_back(z);
    else r.spurious.push_back(z);
  }
  const bool oracle_stable = r.persistent_unstable.empty();
  r.consistent = (winding == 0) == oracle_stable;
  r.summary = std::string(r.consistent ? "consistent" : "inconsistent") + ": winding " +
              std::to_string(winding) + ", " + std::to_string(r.persistent_unstable.size()) +
              " persistent and " + std::to_string(r.spurious.size()) +
              " spurious oracle eigenvalues with Re > cutoff";
  return r;
}

/// max |w - z| over persistent coarse eigenvalues z (those moving <= 50%).
inline double persistent_shift(const std::vector<cd>& coarse, const std::vector<cd>& fine) {
  double worst = 0.0;
  for (const cd& z : coarse) {
    double best = std::numeric_limits<double>::infinity();
    for (const cd& w : fine) best = std::min(best, std::abs(w - z));
    if (best <= 0.5 * std::abs(z)) worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace qhd
