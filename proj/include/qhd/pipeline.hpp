#pragma once

// End-to-end runs: profile, stability verdict, essential spectrum, oracle.
// The CLI is a thin layer over these functions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qhd/contour.hpp"
#include "qhd/error.hpp"
#include "qhd/evans.hpp"
#include "qhd/io.hpp"
#include "qhd/linearize.hpp"
#include "qhd/model.hpp"
#include "qhd/oracle.hpp"
#include "qhd/parallel.hpp"
#include "qhd/profile.hpp"

namespace qhd {

struct ContourConfig {
  ContourKind kind = ContourKind::semicircle;
  double inner_radius = 5.0;
  double outer_radius = 10.0;
  std::size_t nodes = 10'000;
  double offset = 1e-6;
  /// Evaluate Im >= 0 only and complete the loop by E(conj z) = conj E(z).
  bool mirror = false;
  std::optional<cd> cauchy_point;
};

struct Thresholds {
  double symmetry = 1e-4;
  double real_axis_imag = 1e-6;
  double cauchy = 1e-3;
  double small_variation = 1e-2;
};

struct OracleConfig {
  bool enabled = false;
  std::size_t N = 400;
  double L = 40.0;
  double cutoff = 1e-2;
  std::size_t count = 20;
};

struct RunConfig {
  std::string preset;
  ShockParams params;
  ProfileOptions profile;
  ContourConfig contour;
  EvansOptions evans;
  Thresholds thresholds;
  OracleConfig oracle;
  /// Exclusion radius beyond which no eigenvalues are expected (configuration input).
  double exclusion_radius = 1.9e4;
  unsigned workers = default_workers();
  std::filesystem::path out_dir = "out";
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1a", "fig1b", "sec53"};
  return names;
}

/// Parameter sets with every tolerance pinned. Profile half-lengths are the
/// smallest round values that bring the terminal residual well below 1e-3.
inline RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  const double sqrt2 = std::numbers::sqrt2;
  if (name == "fig1a") {
    c.params = ShockParams::from_end_states(1.0, 8.0, 1.0, 1.0, 8.61, 5.69);
    c.profile.L1 = 200.0;
  } else if (name == "fig1b") {
    c.params = ShockParams::from_end_states(1.5, 0.25, sqrt2, 1.0, 4.63, 3.5);
    c.profile.L1 = 80.0;
  } else if (name == "sec53") {
    c.params = ShockParams::from_AB(1.5, 1.0, sqrt2, 1.0, 1.0, 1.1);
    c.profile.L1 = 40.0;
  } else {
    throw Error(Errc::invalid_parameters, "unknown preset '" + name + "'");
  }
  c.evans.L1 = 40.0;
  return c;
}

/// The contour set used for the stability verdict of a preset.
inline ContourConfig desk_semicircle() { return {ContourKind::semicircle, 0.0, 10.0, 10'000, 1e-6, false, std::nullopt}; }
inline ContourConfig desk_semiannulus() { return {ContourKind::semiannulus, 5.0, 1e3, 100'000, 1e-6, true, cd(500.0, 0.0)}; }
inline ContourConfig small_contour() { return {ContourKind::small, 1e-6, 1e-6, 1'000, 1e-6, false, std::nullopt}; }
inline ContourConfig full_scale_semiannulus() {
  return {ContourKind::semiannulus, 5.0, 1.9e4, 10'000'000, 1e-6, true, cd(1.9e4 - 20.0, 0.0)};
}

struct ProfileReport {
  ProfileSolution solution;
  ExistenceReport existence;
};

inline ProfileReport run_profile(const RunConfig& cfg) {
  ProfileReport r;
  r.existence = check_existence(cfg.params);
  r.solution = shoot_profile(cfg.params, cfg.profile);
  return r;
}

inline io::json fixed_point_json(const FixedPointAnalysis& f) {
  io::json j = {{"P", f.P},
                {"kind", to_string(f.kind)},
                {"mu1", io::complex_json(f.mu1)},
                {"mu2", io::complex_json(f.mu2)},
                {"discriminant", f.discriminant},
                {"slope", f.slope}};
  if (f.v2) j["v2"] = {(*f.v2)[0], (*f.v2)[1]};
  return j;
}

inline io::json profile_json(const RunConfig& cfg, const ProfileReport& r) {
  const ProfileSolution& s = r.solution;
  const ExistenceReport& e = r.existence;
  io::json ex = {{"profile_exists", e.profile_exists},
                 {"non_monotone", e.non_monotone},
                 {"oscillation_applicable", e.oscillation_applicable},
                 {"f1_max", e.f1_max},
                 {"f1_argmax", e.f1_argmax},
                 {"threshold_lhs", e.threshold_lhs}};
  ex["threshold_rhs"] = std::isfinite(e.threshold_rhs) ? io::json(e.threshold_rhs) : io::json(nullptr);
  return {{"preset", cfg.preset},
          {"params", io::params_to_json(cfg.params)},
          {"existence", ex},
          {"classification", s.monotone ? "monotone" : "oscillatory"},
          {"q_sign_changes", s.q_sign_changes},
          {"convergence_residual", s.convergence_residual},
          {"L1", s.L1},
          {"grid_points", s.size()},
          {"shooting_length", s.shooting_length},
          {"saddle", fixed_point_json(s.saddle)},
          {"attractor", fixed_point_json(s.attractor)}};
}

struct Check {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

struct StabilityReport {
  ContourConfig config;
  Contour contour;
  EvansTrace trace;  // all contour nodes; mirrored values filled by symmetry
  std::size_t evaluated = 0;
  std::optional<WindingReport> winding;
  double symmetry_residual = -1.0;
  double real_axis_ratio = -1.0;
  double relative_variation = -1.0;
  std::optional<cd> cauchy_point;
  cd cauchy_quadrature{};
  cd cauchy_direct{};
  double cauchy_rel_err = -1.0;
  std::optional<CrossCheckReport> cross_check;
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

/// E at a single point with the frame carried from the contour's seed along a
/// straight path, so it shares the contour's analytic normalization.
inline EvansValue evans_on_path(cd target, cd seed, const ProfileSolution& sol, const EvansOptions& opt,
                                std::size_t steps = 2000) {
  std::vector<cd> path(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i)
    path[i] = seed + (target - seed) * (static_cast<double>(i) / static_cast<double>(steps));
  path.back() = target;
  const std::vector<EvansFrame> frames = kato_continue(path, sol.params, 0);
  return evans_eval(target, sol, frames.back(), opt);
}

struct OracleSpectra {
  std::vector<cd> coarse;  // N
  std::vector<cd> fine;    // 2N
  std::size_t N = 0;
  double L = 0.0;
};

inline OracleSpectra run_oracle(const ProfileSolution& sol, const OracleConfig& oc) {
  OracleSpectra o;
  o.N = oc.N;
  o.L = std::min(oc.L, sol.L1);
  o.coarse = oracle_spectrum(discretize(sol, oc.N, o.L));
  o.fine = oracle_spectrum(discretize(sol, 2 * oc.N, o.L));
  return o;
}

inline StabilityReport run_stability(const RunConfig& cfg, const ProfileSolution& sol,
                                     const ContourConfig& cc, const OracleSpectra* oracle = nullptr) {
  StabilityReport r;
  r.config = cc;
  r.contour = build_contour(cc.kind, cc.inner_radius, cc.outer_radius, cc.nodes, cc.offset);
  if (r.contour.closed && r.contour.outer_radius > cfg.exclusion_radius * (1.0 + 1e-12))
    throw Error(Errc::geometry, "outer radius exceeds the exclusion radius");
  const Contour& c = r.contour;
  const bool mirror = cc.mirror && c.closed;

  std::vector<EvansFrame> frames;
  if (mirror) {
    frames = kato_continue(c.upper_half(), sol.params, 0);
  } else {
    frames = kato_continue(c.nodes, sol.params, c.seed);
  }
  r.evaluated = frames.size();
  r.trace = evaluate_trace(std::move(frames), sol, cfg.evans, cfg.workers);
  if (mirror) {
    // complete the closed loop: node half + i is conj of node half - i
    for (std::size_t i = c.half; i-- > 0;) {
      r.trace.nodes.push_back(std::conj(r.trace.nodes[i]));
      r.trace.values.push_back(std::conj(r.trace.values[i]));
    }
  }

  if (c.closed) {
    r.winding = winding_number(r.trace.values);
    r.checks.push_back({"winding_zero", static_cast<double>(r.winding->winding), 0.0, r.winding->winding == 0});
    r.checks.push_back({"winding_near_integer", std::abs(r.winding->turns - r.winding->winding), 0.1,
                        std::abs(r.winding->turns - r.winding->winding) <= 0.1});
  } else {
    const cd ref = r.trace.values[c.seed];
    double var = 0.0;
    for (const cd& v : r.trace.values) var = std::max(var, std::abs(v - ref) / std::abs(ref));
    r.relative_variation = var;
    r.checks.push_back({"min_abs_E_positive", r.trace.min_abs, 0.0, r.trace.min_abs > 0.0});
    r.checks.push_back({"relative_variation", var, cfg.thresholds.small_variation,
                        var < cfg.thresholds.small_variation});
  }

  if (!mirror) {
    r.symmetry_residual = conjugate_symmetry_residual(r.trace);
    r.real_axis_ratio = real_axis_imaginary_ratio(r.trace);
    if (r.symmetry_residual >= 0.0)
      r.checks.push_back({"conjugate_symmetry", r.symmetry_residual, cfg.thresholds.symmetry,
                          r.symmetry_residual < cfg.thresholds.symmetry});
    if (r.real_axis_ratio >= 0.0)
      r.checks.push_back({"real_axis_imag", r.real_axis_ratio, cfg.thresholds.real_axis_imag,
                          r.real_axis_ratio < cfg.thresholds.real_axis_imag});
  }

  if (c.closed && cc.cauchy_point) {
    r.cauchy_point = cc.cauchy_point;
    r.cauchy_quadrature = cauchy_quadrature(r.trace.nodes, r.trace.values, *cc.cauchy_point);
    r.cauchy_direct = evans_on_path(*cc.cauchy_point, c.nodes[c.seed], sol, cfg.evans).E;
    r.cauchy_rel_err = cauchy_relative_error(r.cauchy_quadrature, r.cauchy_direct);
    r.checks.push_back({"cauchy", r.cauchy_rel_err, cfg.thresholds.cauchy,
                        r.cauchy_rel_err < cfg.thresholds.cauchy});
  }

  if (oracle && c.closed && r.winding) {
    r.cross_check = qhd::cross_check(r.winding->winding, c, oracle->coarse, oracle->fine, cfg.oracle.cutoff);
    r.checks.push_back({"oracle_cross_check", static_cast<double>(r.cross_check->persistent_unstable.size()),
                        0.0, r.cross_check->consistent});
  }
  return r;
}

inline io::json stability_json(const StabilityReport& r) {
  io::json j;
  j["contour"] = {{"kind", to_string(r.contour.kind)},
                  {"inner_radius", r.contour.inner_radius},
                  {"outer_radius", r.contour.outer_radius},
                  {"offset", r.contour.imag_offset},
                  {"nodes", r.contour.nodes.size()},
                  {"evaluated", r.evaluated},
                  {"mirrored", r.config.mirror && r.contour.closed}};
  j["winding"] = r.winding ? io::json(r.winding->winding) : io::json(nullptr);
  j["winding_turns"] = r.winding ? io::json(r.winding->turns) : io::json(nullptr);
  j["min_abs_E"] = r.trace.min_abs;
  j["max_abs_E"] = r.trace.max_abs;
  j["cauchy_rel_err"] = r.cauchy_point ? io::json(r.cauchy_rel_err) : io::json(nullptr);
  if (r.cauchy_point) {
    j["cauchy_point"] = io::complex_json(*r.cauchy_point);
    j["cauchy_quadrature"] = io::complex_json(r.cauchy_quadrature);
    j["cauchy_direct"] = io::complex_json(r.cauchy_direct);
  }
  j["symmetry_residual"] = r.symmetry_residual >= 0.0 ? io::json(r.symmetry_residual) : io::json(nullptr);
  j["real_axis_imag_ratio"] = r.real_axis_ratio >= 0.0 ? io::json(r.real_axis_ratio) : io::json(nullptr);
  if (r.relative_variation >= 0.0) j["relative_variation"] = r.relative_variation;
  j["integrator_steps"] = r.trace.total_steps;
  j["implicit_fallbacks"] = r.trace.implicit_fallbacks;
  if (r.cross_check) {
    io::json pu = io::json::array(), sp = io::json::array();
    for (const cd& z : r.cross_check->persistent_unstable) pu.push_back(io::complex_json(z));
    for (const cd& z : r.cross_check->spurious) sp.push_back(io::complex_json(z));
    j["oracle"] = {{"consistent", r.cross_check->consistent},
                   {"cutoff", r.cross_check->cutoff},
                   {"persistent_unstable", pu},
                   {"spurious", sp},
                   {"summary", r.cross_check->summary}};
  }
  io::json checks = io::json::array();
  for (const Check& c : r.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  j["checks"] = checks;
  j["pass"] = r.pass();
  return j;
}

struct EssentialReport {
  EndState end;
  ConstantState state;
  EssentialCurves curves;
  std::vector<ResolventAudit> audit;
  bool subsonic = false;

  bool pass() const {
    if (!subsonic || !(curves.max_real <= 1e-12)) return false;
    return std::all_of(audit.begin(), audit.end(), [](const ResolventAudit& a) { return a.pass; });
  }
};

/// Dispersion curves on xi in [-50, 50] in the shock frame, plus the symbol
/// bound at `audit_points` seeded random lambda with Re in (0, 10], |Im| <= 10.
inline EssentialReport run_essential(const ShockParams& p, EndState end, std::size_t xi_points = 20001,
                                     std::size_t audit_points = 20, unsigned seed = 12345) {
  EssentialReport r;
  r.end = end;
  r.state = end_state(p, end);
  r.subsonic = r.state.subsonic();
  const std::vector<double> xi = uniform_grid(-50.0, 50.0, xi_points);
  r.curves = essential_spectrum_curves(r.state, xi, p.s);
  if (!r.subsonic) return r;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(0.0, 10.0), im(-10.0, 10.0);
  for (std::size_t i = 0; i < audit_points; ++i) {
    const cd lambda(10.0 - re(rng), im(rng));  // (0, 10]
    r.audit.push_back(resolvent_symbol_bound(lambda, r.state, xi));
  }
  return r;
}

}  // namespace qhd
