#pragma once

// Contours in the right half-plane, argument-principle winding numbers and a
// Cauchy-integral consistency check for traced Evans values.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qhd/error.hpp"
#include "qhd/linalg.hpp"

namespace qhd {

enum class ContourKind { semicircle, semiannulus, small };

inline const char* to_string(ContourKind k) {
  switch (k) {
    case ContourKind::semicircle: return "semicircle";
    case ContourKind::semiannulus: return "semiannulus";
    case ContourKind::small: return "small";
  }
  return "?";
}

inline ContourKind contour_kind_from_string(const std::string& s) {
  if (s == "semicircle") return ContourKind::semicircle;
  if (s == "semiannulus" || s == "semi-annulus") return ContourKind::semiannulus;
  if (s == "small" || s == "small-semicircle") return ContourKind::small;
  throw Error(Errc::invalid_parameters, "unknown contour kind '" + s + "'");
}

/// Ordered, positively oriented node list.
///
/// Closed kinds store first == last and are symmetric under conjugation:
/// nodes[0..half] run through Im >= 0 from the outer real point and the rest
/// is the mirror image traversed back. The small kind is an open arc
/// r e^{i theta}, |theta| <= acos(0.1), ordered by increasing theta.
struct Contour {
  ContourKind kind = ContourKind::semicircle;
  double inner_radius = 0.0;  // semi-annulus and small arc
  double outer_radius = 0.0;
  double imag_offset = 1e-6;  // Re of the vertical segment
  std::vector<cd> nodes;
  bool closed = true;
  std::size_t half = 0;  // index of the last upper-half node (closed kinds)
  std::size_t seed = 0;  // real node used to seed frame continuation

  std::span<const cd> upper_half() const { return {nodes.data(), half + 1}; }
};

namespace detail {

// Node density on the vertical segment ~ 1/|lambda| + 1/sqrt|lambda|, i.e.
// geometric near the origin and sqrt-graded further out.
inline double segment_measure(double t, double offset) {
  return std::asinh(t / offset) + 2.0 * std::sqrt(t);
}

inline double invert_segment_measure(double m, double offset, double t_max) {
  double lo = 0.0, hi = t_max;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (segment_measure(mid, offset) < m) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double arc_measure(double radius, double angle) {
  return angle * radius * (1.0 / radius + 1.0 / std::sqrt(radius));
}

// One piece of the upper-half path, parametrized by its share of the measure.
struct Piece {
  double measure;
  std::function<cd(double)> at;  // fraction in [0, 1] -> point
};

}  // namespace detail

/// Builds a contour with `n_nodes` intervals in total.
inline Contour build_contour(ContourKind kind, double inner_radius, double outer_radius,
                             std::size_t n_nodes, double imag_offset = 1e-6) {
  if (n_nodes < 64) throw Error(Errc::geometry, "contour needs at least 64 nodes");
  if (!(imag_offset > 0.0) || !std::isfinite(imag_offset))
    throw Error(Errc::geometry, "imaginary-axis offset must be positive");
  Contour c;
  c.kind = kind;
  c.inner_radius = inner_radius;
  c.outer_radius = outer_radius;
  c.imag_offset = imag_offset;

  if (kind == ContourKind::small) {
    const double r = inner_radius > 0.0 ? inner_radius : outer_radius;
    if (!(r > 0.0)) throw Error(Errc::geometry, "small contour needs a positive radius");
    c.inner_radius = c.outer_radius = r;
    c.closed = false;
    const double theta = std::acos(0.1);
    c.nodes.resize(n_nodes + 1);
    for (std::size_t i = 0; i <= n_nodes; ++i) {
      const double t = -theta + 2.0 * theta * static_cast<double>(i) / static_cast<double>(n_nodes);
      c.nodes[i] = std::polar(r, t);
    }
    c.seed = n_nodes / 2;
    c.nodes[c.seed] = cd(r, 0.0);
    c.half = n_nodes;
    return c;
  }

  const double R = outer_radius;
  const double r = kind == ContourKind::semiannulus ? inner_radius : 0.0;
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(Errc::geometry, "outer radius must be positive");
  if (kind == ContourKind::semiannulus && !(r > 0.0))
    throw Error(Errc::geometry, "inner radius must be positive");
  if (kind == ContourKind::semiannulus && !(r < R))
    throw Error(Errc::geometry, "inner radius must be smaller than the outer radius");
  if (!(imag_offset < (r > 0.0 ? r : R)))
    throw Error(Errc::geometry, "offset must be smaller than every radius");

  // upper-half path: outer arc from R to the segment, segment down, inner arc
  const double th_out = std::acos(imag_offset / R);
  const double t_top = std::sqrt(R * R - imag_offset * imag_offset);
  const double t_bot = r > 0.0 ? std::sqrt(r * r - imag_offset * imag_offset) : 0.0;
  const double th_in = r > 0.0 ? std::acos(imag_offset / r) : 0.0;
  const double m_top = detail::segment_measure(t_top, imag_offset);
  const double m_bot = detail::segment_measure(t_bot, imag_offset);

  std::vector<detail::Piece> pieces;
  pieces.push_back({detail::arc_measure(R, th_out), [=](double f) { return std::polar(R, f * th_out); }});
  pieces.push_back({m_top - m_bot, [=](double f) {
                      const double m = m_top - f * (m_top - m_bot);
                      const double t = f == 0.0 ? t_top
                                       : f == 1.0 ? t_bot
                                                  : detail::invert_segment_measure(m, imag_offset, t_top);
                      return cd(imag_offset, t);
                    }});
  if (r > 0.0)
    pieces.push_back({detail::arc_measure(r, th_in), [=](double f) { return std::polar(r, (1.0 - f) * th_in); }});

  double total = 0.0;
  for (const auto& p : pieces) total += p.measure;
  const std::size_t m = n_nodes / 2;
  std::vector<cd> upper(m + 1);
  std::size_t piece = 0;
  double start = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    const double target = total * static_cast<double>(i) / static_cast<double>(m);
    while (piece + 1 < pieces.size() && target > start + pieces[piece].measure) {
      start += pieces[piece].measure;
      ++piece;
    }
    const double f = std::clamp((target - start) / pieces[piece].measure, 0.0, 1.0);
    upper[i] = pieces[piece].at(f);
  }
  upper.front() = cd(R, 0.0);
  upper.back() = cd(r > 0.0 ? r : imag_offset, 0.0);

  c.nodes = upper;
  for (std::size_t i = m; i-- > 0;) c.nodes.push_back(std::conj(upper[i]));
  c.half = m;
  c.seed = 0;
  return c;
}

/// Minimum distance between consecutive nodes (closed kinds wrap around).
inline double min_node_spacing(std::span<const cd> nodes) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (nodes[i + 1] != nodes[i]) d = std::min(d, std::abs(nodes[i + 1] - nodes[i]));
  return d;
}

struct WindingReport {
  int winding = 0;
  double turns = 0.0;  // unwrapped phase / 2 pi before rounding
  double max_jump = 0.0;
  std::size_t max_jump_index = 0;
  double min_abs = 0.0;
};

/// Discrete argument principle over an ordered list of values. `mirror` adds
/// the conjugate-symmetric lower half, which contributes the same phase.
inline WindingReport winding_number(std::span<const cd> values, bool mirror = false) {
  if (values.size() < 2) throw Error(Errc::insufficient_resolution, "winding needs >= 2 values");
  WindingReport w;
  double max_abs = 0.0;
  w.min_abs = std::numeric_limits<double>::infinity();
  for (const cd& v : values) {
    max_abs = std::max(max_abs, std::abs(v));
    w.min_abs = std::min(w.min_abs, std::abs(v));
  }
  if (!(w.min_abs > 1e-12 * max_abs))
    throw Error(Errc::possible_zero_on_contour, "|E| vanishes on the contour to 1e-12 of its maximum");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double d = std::arg(values[i + 1] / values[i]);
    if (std::abs(d) > w.max_jump) {
      w.max_jump = std::abs(d);
      w.max_jump_index = i;
    }
    total += d;
  }
  if (w.max_jump > 0.5 * std::numbers::pi)
    throw Error(Errc::insufficient_resolution,
                "phase jump " + std::to_string(w.max_jump) + " at node " +
                    std::to_string(w.max_jump_index) + "; refine the contour");
  if (mirror) total *= 2.0;
  w.turns = total / (2.0 * std::numbers::pi);
  w.winding = static_cast<int>(std::lround(w.turns));
  if (std::abs(w.turns - w.winding) > 0.1)
    throw Error(Errc::insufficient_resolution,
                "unwrapped phase is " + std::to_string(w.turns) + " turns, not near an integer");
  return w;
}

/// Trapezoidal (1/2 pi i) sum of E(z)/(z - a) dz along a closed node list.
inline cd cauchy_quadrature(std::span<const cd> nodes, std::span<const cd> values, cd a) {
  if (nodes.size() != values.size() || nodes.size() < 3)
    throw Error(Errc::size, "cauchy quadrature needs matching node and value lists");
  if (nodes.front() != nodes.back())
    throw Error(Errc::geometry, "cauchy quadrature needs a closed contour");
  double spacing = 0.0;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    dist = std::min(dist, std::abs(nodes[i] - a));
    if (i + 1 < nodes.size()) spacing = std::max(spacing, std::abs(nodes[i + 1] - nodes[i]));
  }
  if (!(dist > spacing))
    throw Error(Errc::ill_conditioned, "test point lies within one node spacing of the contour");
  cd sum = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const cd g0 = values[i] / (nodes[i] - a);
    const cd g1 = values[i + 1] / (nodes[i + 1] - a);
    sum += 0.5 * (g0 + g1) * (nodes[i + 1] - nodes[i]);
  }
  return sum / cd(0.0, 2.0 * std::numbers::pi);
}

/// Relative error between the quadrature and a directly computed value.
inline double cauchy_relative_error(cd quadrature, cd direct) {
  return std::abs(quadrature - direct) / std::abs(direct);
}

}  // namespace qhd
