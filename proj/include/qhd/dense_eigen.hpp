#pragma once

// Eigenvalues of a dense real matrix: balancing, Householder reduction to
// upper Hessenberg form and the Francis double-shift QR iteration.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qhd/error.hpp"

namespace qhd::dense {

/// Diagonal similarity by powers of 2 that equalizes row and column norms.
inline void balance(Eigen::MatrixXd& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

/// In-place reduction to upper Hessenberg form by Householder reflections.
inline void hessenberg(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index m = n - k - 1;
    auto x = a.col(k).segment(k + 1, m);
    const double alpha = x.norm();
    if (alpha == 0.0) continue;
    v.head(m) = x;
    v[0] += x[0] >= 0.0 ? alpha : -alpha;
    const double vn2 = v.head(m).squaredNorm();
    if (vn2 == 0.0) continue;
    // H = I - 2 v v^T / |v|^2 applied from both sides
    for (Eigen::Index j = k; j < n; ++j) {
      const double d = 2.0 * v.head(m).dot(a.col(j).segment(k + 1, m)) / vn2;
      a.col(j).segment(k + 1, m) -= d * v.head(m);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = 2.0 * a.row(i).segment(k + 1, m).dot(v.head(m)) / vn2;
      a.row(i).segment(k + 1, m) -= d * v.head(m).transpose();
    }
    a.col(k).segment(k + 2, m - 1).setZero();
  }
}

/// All eigenvalues of an upper Hessenberg matrix (destroyed on output).
/// Throws after 30 * n QR sweeps in total.
inline std::vector<std::complex<double>> hessenberg_qr(Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::complex<double>> w(n);
  if (n == 0) return w;
  const auto sign = [](double x, double y) { return y >= 0.0 ? std::abs(x) : -std::abs(x); };
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  const long budget = 30L * n;
  long sweeps = 0;
  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0, l = 0;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) + s == s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        w[nn--] = {x + t, 0.0};
      } else {
        double y = a(nn - 1, nn - 1);
        double ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + ww;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign(z, p);
            w[nn - 1] = w[nn] = {x + z, 0.0};
            if (z != 0.0) w[nn] = {x - ww / z, 0.0};
          } else {
            w[nn - 1] = {x + p, z};
            w[nn] = {x + p, -z};
          }
          nn -= 2;
        } else {
          if (++sweeps > budget)
            throw Error(Errc::eigensolver_failure,
                        "QR iteration did not converge within 30 sweeps per row");
          if (its == 10 || its == 20) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            const double s0 = y - z;
            p = (r * s0 - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s0;
            r = a(m + 2, m + 1);
            const double s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = k != nn - 1 ? a(k + 2, k - 1) : 0.0;
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = std::min(nn, k + 3);
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return w;
}

/// All eigenvalues of a real square matrix.
inline std::vector<std::complex<double>> eigenvalues(Eigen::MatrixXd a) {
  if (a.rows() != a.cols()) throw Error(Errc::size, "eigenvalues need a square matrix");
  if (!a.allFinite()) throw Error(Errc::eigensolver_failure, "matrix has non-finite entries");
  balance(a);
  hessenberg(a);
  return hessenberg_qr(a);
}

}  // namespace qhd::dense
