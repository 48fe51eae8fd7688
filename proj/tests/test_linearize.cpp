#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qhd/linearize.hpp"
#include "support.hpp"

using namespace qhd;

namespace {

// Characteristic polynomial of M± from the determinant expansion of the
// companion-like structure, independent of any eigensolver.
cd charpoly(const Mat4c& m, cd z) {
  return (m - z * Mat4c::Identity()).determinant();
}

}  // namespace

TEST(SystemMatrix, SparsityPattern) {
  const ProfileSolution& s = test::preset_profile("sec53");
  const SpectralMatrix M = mhat(-3.3, cd(1.5, 2.0), s);
  const Mat4c& m = M.entries;
  EXPECT_EQ(m.row(0), (Eigen::RowVector4cd() << 0.0, 0.0, 1.0, 0.0).finished());
  EXPECT_EQ(m(1, 0), -cd(1.5, 2.0));
  EXPECT_EQ(m(1, 1), 0.0);
  EXPECT_EQ(m(1, 2), cd(s.params.s));
  EXPECT_EQ(m(1, 3), 0.0);
  EXPECT_EQ(m.row(2), (Eigen::RowVector4cd() << 0.0, 0.0, 0.0, 1.0).finished());
}

TEST(SystemMatrix, FourthRowFromIndependentEvaluation) {
  const ProfileSolution& s = test::preset_profile("fig1a");
  const ShockParams& p = s.params;
  const cd lambda(0.7, -1.1);
  for (double y : {-30.0, -1.0, 0.0, 2.5, 17.0}) {
    const ProfileSample smp = sample_profile(s, y);
    const double u = (p.s * smp.P - p.A) / smp.P;  // J/P recomputed directly
    const double c1 = u * u - p.gamma * std::pow(smp.P, p.gamma - 1.0);
    const double c2 = p.s - 2.0 * u;
    const ProfileCoefficients pc = profile_coefficients(p, smp.P, smp.J);
    EXPECT_NEAR(pc.c1, c1, 1e-12);
    EXPECT_NEAR(pc.c2, c2, 1e-12);
    const double k2 = p.k * p.k, qp = smp.Q / smp.P;
    const Mat4c m = mhat(y, lambda, s).entries;
    EXPECT_LT(std::abs(m(3, 0) - 2.0 * lambda * c2 / k2), 1e-12);
    EXPECT_LT(std::abs(m(3, 1) - 2.0 * lambda / k2), 1e-12);
    EXPECT_LT(std::abs(m(3, 2) - (2.0 * lambda * p.mu / k2 - 2.0 * c1 / k2 - 2.0 * p.s * c2 / k2 - qp * qp)), 1e-12);
    EXPECT_LT(std::abs(m(3, 3) - (2.0 * qp - 2.0 * p.s * p.mu / k2)), 1e-12);
  }
}

TEST(SystemMatrix, ClampedEqualsAsymptoticExactly) {
  const ProfileSolution& s = test::preset_profile("sec53");
  for (cd lambda : {cd(1.0, 0.0), cd(0.3, 4.0), cd(100.0, -7.0)}) {
    EXPECT_EQ(mhat(s.L1, lambda, s).entries, m_pm(lambda, s.params, EndState::plus).entries);
    EXPECT_EQ(mhat(1e9, lambda, s).entries, m_pm(lambda, s.params, EndState::plus).entries);
    EXPECT_EQ(mhat(-s.L1, lambda, s).entries, m_pm(lambda, s.params, EndState::minus).entries);
  }
}

TEST(SystemMatrix, LambdaZeroDropsLambdaTerms) {
  const ProfileSolution& s = test::preset_profile("sec53");
  const Mat4c m = mhat(0.4, 0.0, s).entries;
  EXPECT_EQ(m(1, 0), 0.0);
  EXPECT_EQ(m(3, 0), 0.0);
  EXPECT_EQ(m(3, 1), 0.0);
}

TEST(Asymptotic, RealForRealLambdaAndTrace) {
  const ShockParams p = test::sec53();
  for (EndState e : {EndState::minus, EndState::plus}) {
    const Mat4c m = m_pm(2.5, p, e).entries;
    EXPECT_EQ(m.imag().norm(), 0.0);
    EXPECT_NEAR(m.trace().real(), -2.0 * p.s * p.mu / (p.k * p.k), 1e-14);
  }
}

TEST(Asymptotic, EigenvaluesAreCharacteristicRoots) {
  const ShockParams p = test::sec53();
  for (EndState e : {EndState::minus, EndState::plus}) {
    const Mat4c m = m_pm(1.0, p, e).entries;
    const SortedEigen4 se = sorted_eigen(m);
    for (int i = 0; i < 4; ++i) EXPECT_LT(std::abs(charpoly(m, se.values[i])), 1e-10);
    for (int i = 0; i < 4; ++i)
      EXPECT_LT((m * se.right.col(i) - se.values[i] * se.right.col(i)).norm(), 1e-10);
  }
}

TEST(Asymptotic, CoefficientsMatchConstantState) {
  const ShockParams p = test::sec53();
  for (EndState e : {EndState::minus, EndState::plus}) {
    const AsymptoticCoefficients c = asymptotic_coefficients(p, e);
    const ConstantState st = end_state(p, e);
    EXPECT_DOUBLE_EQ(c.alpha, st.alpha());
    EXPECT_NEAR(c.beta, p.s + st.beta(), 1e-15);
    EXPECT_TRUE(st.subsonic());
  }
}

TEST(Asymptotic, HyperbolicSplittingOnContourSample) {
  // 50 lambda on the semicircle of radius 10 and the inner semi-annulus arc
  const ShockParams p = test::sec53();
  for (int i = 0; i < 50; ++i) {
    const double t = -1.5 + 3.0 * i / 49.0;
    const cd lambda = i % 2 ? std::polar(10.0, t) : std::polar(5.0, t);
    for (EndState e : {EndState::minus, EndState::plus}) {
      const SortedEigen4 se = sorted_eigen(m_pm(lambda, p, e).entries);
      int pos = 0;
      for (int j = 0; j < 4; ++j) pos += se.values[j].real() > 0.0;
      EXPECT_EQ(pos, 2) << lambda;
    }
  }
}

TEST(Dispersion, ZeroFrequency) {
  const auto [a, b] = dispersion_roots(0.0, -1.0, 0.3, 1.0, 1.4);
  EXPECT_EQ(a, 0.0);
  EXPECT_EQ(b, 0.0);
}

TEST(Dispersion, VietaAndResidual) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xi(-50.0, 50.0), al(-3.0, 1.0), be(-2.0, 2.0), mu(0.01, 3.0), k(0.2, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = xi(rng), a = al(rng), b = be(rng), m = mu(rng), kk = k(rng);
    const auto [l1, l2] = dispersion_roots(x, a, b, m, kk);
    const cd ii(0.0, 1.0);
    const cd B = x * (m * x - ii * b);
    const cd C = x * x * (-a + 0.5 * kk * kk * x * x);
    EXPECT_LT(std::abs(l1 + l2 + B), 1e-12 * (1.0 + std::abs(B)));
    EXPECT_LT(std::abs(l1 * l1 + B * l1 + C), 1e-10 * (1.0 + std::abs(C) + std::abs(B * l1)));
    EXPECT_GE(l1.real(), l2.real());
  }
}

TEST(Dispersion, SubsonicRootsInLeftHalfPlane) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> xi(-50.0, 50.0), al(-3.0, 0.0), be(-2.0, 2.0), mu(0.01, 3.0), k(0.2, 3.0);
  for (int i = 0; i < 1000; ++i) {
    double x = xi(rng);
    if (x == 0.0) continue;
    const auto [l1, l2] = dispersion_roots(x, al(rng), be(rng), mu(rng), k(rng));
    EXPECT_LT(l1.real(), 0.0);
    EXPECT_LT(l2.real(), 0.0);
  }
}

TEST(Dispersion, InviscidLimitIsImaginary) {
  const double alpha = -1.3, k = 1.2;
  for (double x : {-3.0, 0.5, 7.0}) {
    const auto [l1, l2] = dispersion_roots(x, alpha, 0.0, 0.0, k);
    const double w = std::abs(x) * std::sqrt(-alpha + 0.5 * k * k * x * x);
    EXPECT_NEAR(l1.real(), 0.0, 1e-12 * w);
    EXPECT_NEAR(l2.real(), 0.0, 1e-12 * w);
    EXPECT_NEAR(std::abs(l1.imag()), w, 1e-12 * w);
  }
}

TEST(Dispersion, RootsSolveDeterminantOfAsymptoticMatrix) {
  // lambda on the essential curves makes M± - i xi singular in the shock frame
  const ShockParams p = test::sec53();
  for (EndState e : {EndState::minus, EndState::plus}) {
    const ConstantState st = end_state(p, e);
    const std::vector<double> xi{-2.0, -0.5, 0.7, 3.0};
    const EssentialCurves c = essential_spectrum_curves(st, xi, p.s);
    for (std::size_t i = 0; i < xi.size(); ++i) {
      for (cd l : {c.lambda1[i], c.lambda2[i]}) {
        const Mat4c m = m_pm(l, p, e).entries - cd(0.0, xi[i]) * Mat4c::Identity();
        const double scale = m.norm();
        EXPECT_LT(std::abs(m.determinant()), 1e-10 * scale * scale * scale * scale);
      }
    }
  }
}

TEST(Essential, PresetEndStatesStayLeft) {
  const std::vector<double> xi = uniform_grid(-50.0, 50.0, 20001);
  for (const char* name : {"fig1a", "fig1b", "sec53"}) {
    const ShockParams p = preset(name).params;
    for (EndState e : {EndState::minus, EndState::plus}) {
      const EssentialCurves c = essential_spectrum_curves(end_state(p, e), xi, p.s);
      EXPECT_LE(c.max_real, 1e-12) << name;
      EXPECT_EQ(c.argmax_xi, 0.0) << name;
    }
  }
}

TEST(Essential, CurvesAreContinuousOnGrid) {
  const ShockParams p = test::sec53();
  const std::vector<double> xi = uniform_grid(-10.0, 10.0, 4001);
  const double dxi = xi[1] - xi[0];
  const EssentialCurves c = essential_spectrum_curves(end_state(p, EndState::plus), xi, 0.0);
  for (std::size_t i = 1; i < xi.size(); ++i) {
    // local slope bound from the growth of the roots: |dlambda/dxi| <= 2 (mu|xi| + |beta| + k|xi| + sqrt(-alpha)) + ...
    const double x = std::abs(xi[i]) + dxi;
    const double bound = 2.0 * (p.mu * x + 2.0 + p.k * x + 2.0);
    const double d1 = std::min(std::abs(c.lambda1[i] - c.lambda1[i - 1]), std::abs(c.lambda1[i] - c.lambda2[i - 1]));
    const double d2 = std::min(std::abs(c.lambda2[i] - c.lambda2[i - 1]), std::abs(c.lambda2[i] - c.lambda1[i - 1]));
    EXPECT_LT(d1, 10.0 * dxi * bound);
    EXPECT_LT(d2, 10.0 * dxi * bound);
  }
}

TEST(Resolvent, UnitStateAtOne) {
  const ConstantState st{1.0, 0.0, 1.5, 1.0, std::sqrt(2.0)};
  const ResolventAudit a = resolvent_symbol_bound(1.0, st, uniform_grid(-50.0, 50.0, 20001));
  EXPECT_TRUE(a.pass);
  EXPECT_LE(a.sup_norm, a.bound);
  EXPECT_GT(a.sup_norm, 0.0);
}

TEST(Resolvent, BoundDivergesNearImaginaryAxis) {
  const ConstantState st{1.0, 0.0, 1.5, 1.0, std::sqrt(2.0)};
  const std::vector<double> xi = uniform_grid(-50.0, 50.0, 2001);
  double prev = 0.0;
  for (double re : {1e-1, 1e-3, 1e-6}) {
    const ResolventAudit a = resolvent_symbol_bound(cd(re, 0.5), st, xi);
    EXPECT_TRUE(a.pass);
    EXPECT_GT(a.bound, prev);
    prev = a.bound;
  }
}

TEST(Resolvent, InverseNormMatchesSvd) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    Mat2c m;
    m << cd(n(rng), n(rng)), cd(n(rng), n(rng)), cd(n(rng), n(rng)), cd(n(rng), n(rng));
    Eigen::JacobiSVD<Mat2c> svd(m);
    EXPECT_NEAR(inverse_norm_2x2(m), 1.0 / svd.singularValues()[1], 1e-9 / svd.singularValues()[1]);
  }
}

TEST(Resolvent, RandomSubsonicStates) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> P(0.1, 10.0), g(1.0, 3.0), mu(0.05, 5.0), k(0.2, 3.0), u01(0.0, 1.0);
  const std::vector<double> xi = uniform_grid(-50.0, 50.0, 4001);
  int checked = 0;
  while (checked < 100) {
    const double p = P(rng), gamma = g(rng);
    const double c = std::sqrt(gamma * std::pow(p, gamma - 1.0));
    const double J = p * c * (2.0 * u01(rng) - 1.0) * 0.99;  // |J/P| below the sound speed
    const ConstantState st{p, J, gamma, mu(rng), k(rng)};
    ASSERT_TRUE(st.subsonic());
    const cd lambda(10.0 * (1.0 - u01(rng)), 20.0 * u01(rng) - 10.0);
    EXPECT_TRUE(resolvent_symbol_bound(lambda, st, xi).pass);
    ++checked;
  }
}

TEST(Resolvent, Preconditions) {
  const ConstantState supersonic{1.0, 3.0, 1.5, 1.0, 1.0};
  EXPECT_THROW(resolvent_symbol_bound(1.0, supersonic, uniform_grid(-1, 1, 11)), Error);
  const ConstantState st{1.0, 0.0, 1.5, 1.0, 1.0};
  EXPECT_THROW(resolvent_symbol_bound(cd(0.0, 1.0), st, uniform_grid(-1, 1, 11)), Error);
}
