#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "qhd/error.hpp"

namespace qhd {

using cd = std::complex<double>;
using Mat2c = Eigen::Matrix<cd, 2, 2>;
using Mat4c = Eigen::Matrix<cd, 4, 4>;
using Mat6c = Eigen::Matrix<cd, 6, 6>;
using Vec4c = Eigen::Matrix<cd, 4, 1>;
using Vec6c = Eigen::Matrix<cd, 6, 1>;

/// Descending real part; near-equal real parts fall back to descending imag.
inline bool spectral_order(cd a, cd b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(a.real() - b.real()) > 1e-12 * scale) return a.real() > b.real();
  return a.imag() > b.imag();
}

/// Eigen-decomposition with columns sorted by `spectral_order`, plus the
/// inverse eigenvector matrix (its rows are the matching left eigenvectors).
struct SortedEigen4 {
  Vec4c values;
  Mat4c right;
  Mat4c left;  // left.row(i) * M = values[i] * left.row(i), left * right = I
};

inline SortedEigen4 sorted_eigen(const Mat4c& m) {
  Eigen::ComplexEigenSolver<Mat4c> es(m, true);
  if (es.info() != Eigen::Success)
    throw Error(Errc::eigensolver_failure, "4x4 eigen-decomposition failed");
  std::array<int, 4> idx{0, 1, 2, 3};
  const Vec4c& ev = es.eigenvalues();
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return spectral_order(ev[i], ev[j]); });
  SortedEigen4 out;
  for (int c = 0; c < 4; ++c) {
    out.values[c] = ev[idx[c]];
    out.right.col(c) = es.eigenvectors().col(idx[c]);
  }
  out.left = out.right.inverse();
  return out;
}

}  // namespace qhd
