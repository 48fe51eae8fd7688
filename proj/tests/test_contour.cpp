#include <gtest/gtest.h>

#include <numbers>
#include <optional>

#include "qhd/contour.hpp"

using namespace qhd;

namespace {

std::optional<Errc> code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::vector<cd> sample(const std::vector<cd>& nodes, auto&& g) {
  std::vector<cd> v;
  for (const cd& z : nodes) v.push_back(g(z));
  return v;
}

}  // namespace

TEST(ContourGeometry, PreconditionsAreEnforced) {
  EXPECT_EQ(code_of([] { build_contour(ContourKind::semicircle, 0, 10, 63); }), Errc::geometry);
  EXPECT_EQ(code_of([] { build_contour(ContourKind::semiannulus, 10, 5, 1000); }), Errc::geometry);
  EXPECT_EQ(code_of([] { build_contour(ContourKind::semiannulus, 5, 5, 1000); }), Errc::geometry);
  EXPECT_EQ(code_of([] { build_contour(ContourKind::semicircle, 0, -1, 1000); }), Errc::geometry);
  EXPECT_EQ(code_of([] { build_contour(ContourKind::semicircle, 0, 10, 1000, 20.0); }), Errc::geometry);
  EXPECT_EQ(code_of([] { build_contour(ContourKind::semicircle, 0, 10, 64); }), std::nullopt);
}

class ClosedKinds : public ::testing::TestWithParam<std::tuple<ContourKind, double, double, std::size_t>> {};

TEST_P(ClosedKinds, ClosedSymmetricRightHalfPlane) {
  const auto [kind, inner, outer, n] = GetParam();
  const Contour c = build_contour(kind, inner, outer, n);
  ASSERT_TRUE(c.closed);
  EXPECT_EQ(c.nodes.front(), c.nodes.back());
  EXPECT_EQ(c.nodes.size(), n + 1);
  EXPECT_EQ(c.half, n / 2);
  EXPECT_EQ(c.nodes.front(), cd(outer, 0.0));
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const cd z = c.nodes[i];
    EXPECT_GE(z.real(), c.imag_offset * (1 - 1e-12));
    EXPECT_LE(std::abs(z), outer * (1 + 1e-12));
    if (kind == ContourKind::semiannulus) {
      EXPECT_GE(std::abs(z), inner * (1 - 1e-12));
    }
    // conjugate partner sits at the mirrored index
    EXPECT_EQ(c.nodes[c.nodes.size() - 1 - i], std::conj(z));
  }
  for (std::size_t i = 0; i < c.half; ++i) EXPECT_GE(c.nodes[i].imag(), 0.0);
  // positive orientation: signed area > 0
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < c.nodes.size(); ++i)
    area += c.nodes[i].real() * c.nodes[i + 1].imag() - c.nodes[i + 1].real() * c.nodes[i].imag();
  EXPECT_GT(area, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Kinds, ClosedKinds,
                         ::testing::Values(std::make_tuple(ContourKind::semicircle, 0.0, 10.0, 10'000),
                                           std::make_tuple(ContourKind::semicircle, 0.0, 10.0, 64),
                                           std::make_tuple(ContourKind::semiannulus, 5.0, 1e3, 100'000),
                                           std::make_tuple(ContourKind::semiannulus, 5.0, 1.9e4, 4096)));

TEST(ContourGeometry, SegmentHugsTheAxisAtTheOffset) {
  const Contour c = build_contour(ContourKind::semicircle, 0.0, 10.0, 10'000, 1e-6);
  std::size_t on_axis = 0;
  for (const cd& z : c.nodes)
    if (std::abs(z.real() - 1e-6) < 1e-15) ++on_axis;
  EXPECT_GT(on_axis, c.nodes.size() / 4);
  // the real node nearest the origin is the offset itself
  EXPECT_EQ(c.nodes[c.half], cd(1e-6, 0.0));
}

TEST(ContourGeometry, SpacingIsRelativeNearOrigin) {
  // steps shrink with |lambda| so resolution scales toward the origin
  const Contour c = build_contour(ContourKind::semicircle, 0.0, 10.0, 10'000);
  for (std::size_t i = 1; i < c.nodes.size(); ++i) {
    const double r = std::min(std::abs(c.nodes[i]), std::abs(c.nodes[i - 1]));
    if (r < 1.0) {
      EXPECT_LT(std::abs(c.nodes[i] - c.nodes[i - 1]), 1e-2 * std::max(r, 1e-6) + 1e-8);
    }
  }
  EXPECT_LT(min_node_spacing(c.nodes), 1e-7);
}

TEST(ContourGeometry, SmallArc) {
  const Contour c = build_contour(ContourKind::small, 1e-6, 1e-6, 1000);
  EXPECT_FALSE(c.closed);
  EXPECT_EQ(c.nodes.size(), 1001u);
  for (const cd& z : c.nodes) {
    EXPECT_NEAR(std::abs(z), 1e-6, 1e-18);
    EXPECT_GE(z.real(), 0.1 * 1e-6 * (1 - 1e-12));
  }
  EXPECT_EQ(c.nodes[c.seed].imag(), 0.0);
  EXPECT_GT(c.nodes.back().imag(), 0.0);
}

TEST(ContourGeometry, KindNamesRoundTrip) {
  for (ContourKind k : {ContourKind::semicircle, ContourKind::semiannulus, ContourKind::small})
    EXPECT_EQ(contour_kind_from_string(to_string(k)), k);
  EXPECT_EQ(code_of([] { contour_kind_from_string("square"); }), Errc::invalid_parameters);
}

TEST(Winding, ConstantFunctionHasNoTurns) {
  const Contour c = build_contour(ContourKind::semicircle, 0.0, 10.0, 1000);
  const auto v = sample(c.nodes, [](cd) { return cd(2.0, -1.0); });
  EXPECT_EQ(winding_number(v).winding, 0);
  EXPECT_EQ(winding_number(v).turns, 0.0);
}

TEST(Winding, CountsEnclosedZerosAndPoles) {
  const Contour c = build_contour(ContourKind::semiannulus, 5.0, 1e3, 20'000);
  const cd z0(40.0, 3.0), z1(200.0, -100.0), outside(2.0, 0.0), left(-30.0, 0.0);
  EXPECT_EQ(winding_number(sample(c.nodes, [&](cd z) { return z - z0; })).winding, 1);
  EXPECT_EQ(winding_number(sample(c.nodes, [&](cd z) { return (z - z0) * (z - z1); })).winding, 2);
  EXPECT_EQ(winding_number(sample(c.nodes, [&](cd z) { return (z - z0) / (z - z1); })).winding, 0);
  EXPECT_EQ(winding_number(sample(c.nodes, [&](cd z) { return 1.0 / (z - z1); })).winding, -1);
  EXPECT_EQ(winding_number(sample(c.nodes, [&](cd z) { return (z - outside) * (z - left); })).winding, 0);
}

TEST(Winding, MirrorEqualsFullEvaluation) {
  // conjugate-symmetric function: one real zero plus a conjugate pair
  const Contour c = build_contour(ContourKind::semicircle, 0.0, 10.0, 4000);
  const auto g = [](cd z) { return (z - 3.0) * (z - cd(2.0, 4.0)) * (z - cd(2.0, -4.0)); };
  const auto full = winding_number(sample(c.nodes, g));
  const auto upper = sample(std::vector<cd>(c.upper_half().begin(), c.upper_half().end()), g);
  const auto half = winding_number(upper, true);
  EXPECT_EQ(full.winding, 3);
  EXPECT_EQ(half.winding, 3);
  EXPECT_NEAR(full.turns, half.turns, 1e-12);
}

TEST(Winding, InvariantUnderNodeDoubling) {
  const auto g = [](cd z) { return std::exp(z / 5.0) * (z - cd(1.0, 1.0)); };
  for (std::size_t n : {1000u, 2000u, 4000u}) {
    const Contour c = build_contour(ContourKind::semicircle, 0.0, 10.0, n);
    EXPECT_EQ(winding_number(sample(c.nodes, g)).winding, 1) << n;
  }
}

TEST(Winding, CoarsePhaseJumpIsRejected) {
  std::vector<cd> v;
  for (int i = 0; i <= 3; ++i) v.push_back(std::polar(1.0, 2.0 * std::numbers::pi * i / 3));
  EXPECT_EQ(code_of([&] { winding_number(v); }), Errc::insufficient_resolution);
}

TEST(Winding, VanishingValueIsFlagged) {
  const Contour c = build_contour(ContourKind::semicircle, 0.0, 10.0, 1000);
  // zero exactly on a contour node
  const cd on = c.nodes[100];
  const auto v = sample(c.nodes, [&](cd z) { return z - on; });
  EXPECT_EQ(code_of([&] { winding_number(v); }), Errc::possible_zero_on_contour);
}

TEST(Winding, NonIntegerTotalIsRejected) {
  std::vector<cd> v;
  for (int i = 0; i <= 100; ++i) v.push_back(std::polar(1.0, 0.5 * std::numbers::pi * i / 100));
  EXPECT_EQ(code_of([&] { winding_number(v); }), Errc::insufficient_resolution);
}

TEST(Cauchy, ConstantFunction) {
  const Contour c = build_contour(ContourKind::semiannulus, 5.0, 1e3, 100'000);
  const auto v = sample(c.nodes, [](cd) { return cd(1.0, 0.0); });
  const cd q = cauchy_quadrature(c.nodes, v, 500.0);
  EXPECT_LT(cauchy_relative_error(q, 1.0), 1e-3);
}

TEST(Cauchy, ReproducesAnalyticValues) {
  const Contour c = build_contour(ContourKind::semicircle, 0.0, 10.0, 20'000);
  const auto g = [](cd z) { return std::exp(-z / 4.0) / (z + 2.0); };
  for (cd a : {cd(5.0, 0.0), cd(2.0, 3.0), cd(0.5, -1.0)}) {
    const cd q = cauchy_quadrature(c.nodes, sample(c.nodes, g), a);
    EXPECT_LT(cauchy_relative_error(q, g(a)), 1e-4) << a;
  }
}

TEST(Cauchy, ErrorShrinksUnderRefinement) {
  const auto g = [](cd z) { return 1.0 / (z + 0.5); };
  const cd a(4.0, 1.0);
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t n : {500u, 1000u, 2000u, 4000u}) {
    const Contour c = build_contour(ContourKind::semicircle, 0.0, 10.0, n);
    const double err = cauchy_relative_error(cauchy_quadrature(c.nodes, sample(c.nodes, g), a), g(a));
    EXPECT_LT(err, last) << n;
    last = err;
  }
  EXPECT_LT(last, 1e-4);
}

TEST(Cauchy, PointOutsideGivesZero) {
  const Contour c = build_contour(ContourKind::semicircle, 0.0, 10.0, 20'000);
  const auto v = sample(c.nodes, [](cd z) { return z * z; });
  EXPECT_LT(std::abs(cauchy_quadrature(c.nodes, v, cd(-5.0, 0.0))), 1e-4);
}

TEST(Cauchy, Preconditions) {
  const Contour c = build_contour(ContourKind::semicircle, 0.0, 10.0, 1000);
  const auto v = sample(c.nodes, [](cd z) { return z; });
  EXPECT_EQ(code_of([&] { cauchy_quadrature(c.nodes, v, c.nodes[10] + cd(1e-9, 0.0)); }), Errc::ill_conditioned);
  const Contour open = build_contour(ContourKind::small, 1e-6, 1e-6, 100);
  const auto w = sample(open.nodes, [](cd z) { return z; });
  EXPECT_EQ(code_of([&] { cauchy_quadrature(open.nodes, w, 0.0); }), Errc::geometry);
  EXPECT_EQ(code_of([&] { cauchy_quadrature(c.nodes, w, 0.0); }), Errc::size);
}
