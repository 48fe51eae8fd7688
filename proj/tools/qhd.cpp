// Command-line front end. Exit codes: 0 all checks pass, 2 configuration
// error, 3 numerical failure, 4 a stability check failed.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "qhd/pipeline.hpp"

namespace fs = std::filesystem;
using namespace qhd;

namespace {

constexpr int kOk = 0, kConfig = 2, kNumerical = 3, kUnstable = 4;
constexpr const char* kOutEnv = "QHD_OUTPUT_DIR";

struct Options {
  std::string preset = "sec53";
  std::string config;
  std::optional<double> gamma, mu, k, s, p_minus, p_plus, A, B;
  std::optional<double> profile_h, profile_L1;
  std::optional<std::size_t> grid;
  std::optional<std::string> out;
  unsigned workers = default_workers();

  // stability
  std::optional<std::string> contour;
  std::optional<double> outer_radius, inner_radius, offset, cauchy_re, cauchy_im;
  std::optional<std::size_t> nodes;
  std::optional<double> evans_rtol, evans_L1;
  bool full_scale = false;
  bool mirror = false, no_mirror = false;
  bool with_oracle = false;

  // oracle
  std::size_t oracle_N = 400;
  double oracle_L = 40.0;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--preset", o.preset, "fig1a | fig1b | sec53")->capture_default_str();
  app->add_option("--config", o.config, "flat JSON: gamma, mu, k, s and {p_minus, p_plus} or {A, B}");
  app->add_option("--gamma", o.gamma);
  app->add_option("--mu", o.mu);
  app->add_option("--k", o.k);
  app->add_option("--s", o.s);
  app->add_option("--p-minus", o.p_minus);
  app->add_option("--p-plus", o.p_plus);
  app->add_option("--A", o.A);
  app->add_option("--B", o.B);
  app->add_option("--profile-h", o.profile_h, "offset along the unstable eigenvector");
  app->add_option("--profile-L1", o.profile_L1, "profile half-length");
  app->add_option("--grid", o.grid, "profile grid points");
  app->add_option("--out", o.out, std::string("output directory (else $") + kOutEnv + ", else ./out)");
  app->add_option("--workers", o.workers, "threads for the Evans sweep")->capture_default_str();
}

void add_contour(CLI::App* app, Options& o) {
  app->add_option("--contour", o.contour, "semicircle | semiannulus | small");
  app->add_option("--outer-radius", o.outer_radius);
  app->add_option("--inner-radius", o.inner_radius);
  app->add_option("--nodes", o.nodes, "total node intervals on the contour");
  app->add_option("--offset", o.offset, "real part of the vertical segment");
  app->add_option("--cauchy-re", o.cauchy_re, "Cauchy test point, real part");
  app->add_option("--cauchy-im", o.cauchy_im, "Cauchy test point, imaginary part");
  app->add_option("--evans-rtol", o.evans_rtol);
  app->add_option("--evans-L1", o.evans_L1);
  app->add_flag("--full-scale", o.full_scale, "semi-annulus (5, 1.9e4) with 1e7 nodes");
  app->add_flag("--mirror", o.mirror, "evaluate Im >= 0 only and mirror");
  app->add_flag("--no-mirror", o.no_mirror, "evaluate every node");
  app->add_flag("--oracle", o.with_oracle, "cross-check against the finite-difference oracle");
}

RunConfig make_config(const Options& o) {
  RunConfig c = preset(o.preset);
  io::json j = io::json::object();
  if (!o.config.empty()) j = io::read_json(o.config);
  const auto set = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  set("gamma", o.gamma);
  set("mu", o.mu);
  set("k", o.k);
  set("s", o.s);
  set("p_minus", o.p_minus);
  set("p_plus", o.p_plus);
  set("A", o.A);
  set("B", o.B);
  if (!j.empty()) {
    // unspecified physical constants fall back to the preset
    for (const char* key : {"gamma", "mu", "k", "s"})
      if (!j.contains(key)) j[key] = io::params_to_json(c.params)[key];
    if (!j.contains("p_minus") && !j.contains("p_plus") && !j.contains("A") && !j.contains("B")) {
      j["p_minus"] = c.params.p_minus;
      j["p_plus"] = c.params.p_plus;
    }
    c.params = io::params_from_json(j);
    c.preset = o.config.empty() ? o.preset + "-custom" : fs::path(o.config).stem().string();
  }
  if (o.profile_h) c.profile.h = *o.profile_h;
  if (o.profile_L1) c.profile.L1 = *o.profile_L1;
  if (o.grid) c.profile.grid_points = *o.grid;
  if (o.evans_rtol) c.evans.rtol = *o.evans_rtol;
  if (o.evans_L1) c.evans.L1 = *o.evans_L1;
  c.workers = std::max(1u, o.workers);

  if (o.out) c.out_dir = *o.out;
  else if (const char* env = std::getenv(kOutEnv); env && *env) c.out_dir = env;

  ContourConfig& cc = c.contour;
  if (o.full_scale) {
    cc = full_scale_semiannulus();
    c.thresholds.cauchy = 5e-4;
  } else if (o.contour) {
    const ContourKind kind = contour_kind_from_string(*o.contour);
    cc = kind == ContourKind::semicircle    ? desk_semicircle()
         : kind == ContourKind::semiannulus ? desk_semiannulus()
                                            : small_contour();
  } else {
    cc = desk_semicircle();
  }
  if (o.outer_radius) cc.outer_radius = *o.outer_radius;
  if (o.inner_radius) cc.inner_radius = *o.inner_radius;
  if (o.nodes) cc.nodes = *o.nodes;
  if (o.offset) cc.offset = *o.offset;
  if (o.cauchy_re || o.cauchy_im) cc.cauchy_point = cd(o.cauchy_re.value_or(0.0), o.cauchy_im.value_or(0.0));
  if (o.mirror) cc.mirror = true;
  if (o.no_mirror) cc.mirror = false;
  c.oracle.enabled = o.with_oracle;
  c.oracle.N = o.oracle_N;
  c.oracle.L = o.oracle_L;
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path out_file(const RunConfig& c, const std::string& suffix) {
  return c.out_dir / (c.preset + "_" + suffix);
}

int cmd_profile(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProfileReport r = run_profile(c);
  io::write_text(out_file(c, "profile.csv"), io::profile_csv(r.solution));
  io::write_json(out_file(c, "profile.json"), profile_json(c, r));
  std::printf("%s: %s profile, %zu sign changes of Q, residual %.3e, P(-L1)=%.6g, P(L1)=%.6g (%.2fs)\n",
              c.preset.c_str(), r.solution.monotone ? "monotone" : "oscillatory", r.solution.q_sign_changes,
              r.solution.convergence_residual, r.solution.P.front(), r.solution.P.back(), seconds_since(t0));
  std::printf("  non_monotone=%s  |s|mu/k=%.6g  sqrt(-2f')=%.6g  max F1=%.6g\n",
              r.existence.non_monotone ? "true" : "false", r.existence.threshold_lhs,
              r.existence.threshold_rhs, r.existence.f1_max);
  return kOk;
}

void print_stability(const RunConfig& c, const StabilityReport& r, double secs) {
  std::printf("%s %s: %zu nodes (%zu evaluated), min|E|=%.6g", c.preset.c_str(), to_string(r.contour.kind),
              r.contour.nodes.size(), r.evaluated, r.trace.min_abs);
  if (r.winding) std::printf(", winding %d (%.3g turns)", r.winding->winding, r.winding->turns);
  std::printf(" (%.1fs)\n", secs);
  for (const Check& ch : r.checks)
    std::printf("  [%s] %s = %.6g (threshold %.3g)\n", ch.pass ? "pass" : "FAIL", ch.name.c_str(), ch.value,
                ch.threshold);
}

StabilityReport stability_one(const RunConfig& c, const ProfileSolution& sol, const ContourConfig& cc,
                              const OracleSpectra* oracle, const std::string& tag) {
  const auto t0 = std::chrono::steady_clock::now();
  StabilityReport r = run_stability(c, sol, cc, oracle);
  io::write_text(out_file(c, tag + "_trace.csv"), io::trace_csv(r.trace.nodes, r.trace.values));
  io::write_json(out_file(c, tag + "_verdict.json"), stability_json(r));
  print_stability(c, r, seconds_since(t0));
  return r;
}

int cmd_stability(const RunConfig& c) {
  const ProfileSolution sol = shoot_profile(c.params, c.profile);
  std::optional<OracleSpectra> oracle;
  if (c.oracle.enabled) oracle = run_oracle(sol, c.oracle);
  const StabilityReport r =
      stability_one(c, sol, c.contour, oracle ? &*oracle : nullptr, to_string(c.contour.kind));
  return r.pass() ? kOk : kUnstable;
}

int cmd_essential(const RunConfig& c) {
  io::json summary = io::json::array();
  bool ok = true;
  for (EndState end : {EndState::minus, EndState::plus}) {
    const std::string side = end == EndState::minus ? "minus" : "plus";
    const EssentialReport r = run_essential(c.params, end);
    io::write_text(out_file(c, "essential_" + side + ".csv"), io::essential_csv(r.curves));
    io::write_text(out_file(c, "resolvent_" + side + ".csv"), io::resolvent_csv(r.audit));
    std::size_t passed = 0;
    for (const auto& a : r.audit) passed += a.pass ? 1 : 0;
    summary.push_back({{"end", side},
                       {"alpha", r.state.alpha()},
                       {"beta", r.state.beta()},
                       {"subsonic", r.subsonic},
                       {"max_real", r.curves.max_real},
                       {"argmax_xi", r.curves.argmax_xi},
                       {"audit_passed", passed},
                       {"audit_total", r.audit.size()},
                       {"pass", r.pass()}});
    std::printf("%s end %s: alpha=%.6g, max Re over xi in [-50,50] = %.3e, resolvent audit %zu/%zu\n",
                c.preset.c_str(), side.c_str(), r.state.alpha(), r.curves.max_real, passed, r.audit.size());
    ok = ok && r.pass();
  }
  io::write_json(out_file(c, "essential.json"), summary);
  return ok ? kOk : kUnstable;
}

int cmd_oracle(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProfileSolution sol = shoot_profile(c.params, c.profile);
  OracleConfig oc = c.oracle;
  const OracleSpectra o = run_oracle(sol, oc);
  io::write_text(out_file(c, "oracle_N" + std::to_string(o.N) + ".csv"), io::eigenvalue_csv(o.coarse, o.N, o.L));
  io::write_text(out_file(c, "oracle_N" + std::to_string(2 * o.N) + ".csv"),
                 io::eigenvalue_csv(o.fine, 2 * o.N, o.L));
  std::printf("%s oracle N=%zu/%zu L=%g (%.1fs), rightmost:\n", c.preset.c_str(), o.N, 2 * o.N, o.L,
              seconds_since(t0));
  for (std::size_t i = 0; i < std::min<std::size_t>(oc.count, o.coarse.size()); ++i)
    std::printf("  %+.6e %+.6ei\n", o.coarse[i].real(), o.coarse[i].imag());
  const double shift = persistent_shift(
      std::vector<cd>(o.coarse.begin(), o.coarse.begin() + std::min<std::size_t>(oc.count, o.coarse.size())),
      o.fine);
  std::printf("  max shift of persistent rightmost eigenvalues under N -> 2N: %.3e\n", shift);
  return kOk;
}

int cmd_reproduce(const Options& o) {
  int worst = kOk;
  const auto note = [&](int code) { worst = std::max(worst, code); };
  for (const std::string& name : preset_names()) {
    Options po = o;
    po.preset = name;
    const RunConfig c = make_config(po);
    note(cmd_profile(c));
    note(cmd_essential(c));
  }
  Options so = o;
  so.preset = "sec53";
  RunConfig c = make_config(so);
  const ProfileSolution sol = shoot_profile(c.params, c.profile);
  std::optional<OracleSpectra> oracle;
  if (o.with_oracle) oracle = run_oracle(sol, c.oracle);
  const OracleSpectra* op = oracle ? &*oracle : nullptr;
  note(stability_one(c, sol, desk_semicircle(), op, "semicircle").pass() ? kOk : kUnstable);
  note(stability_one(c, sol, small_contour(), nullptr, "small").pass() ? kOk : kUnstable);
  if (o.full_scale) {
    c.thresholds.cauchy = 5e-4;
    note(stability_one(c, sol, full_scale_semiannulus(), op, "semiannulus_full").pass() ? kOk : kUnstable);
  } else {
    note(stability_one(c, sol, desk_semiannulus(), op, "semiannulus").pass() ? kOk : kUnstable);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersive shock profiles of quantum hydrodynamics and their Evans-function stability"};
  app.require_subcommand(1);
  Options o;
  auto* profile = app.add_subcommand("profile", "shoot the profile and write CSV + JSON metadata");
  auto* stability = app.add_subcommand("stability", "Evans sweep on a contour with winding/Cauchy/symmetry checks");
  auto* essential = app.add_subcommand("essential", "dispersion curves and resolvent-bound audit of the end states");
  auto* oracle = app.add_subcommand("oracle", "finite-difference spectrum at N and 2N");
  auto* reproduce = app.add_subcommand("reproduce-paper", "all presets: profiles, essential spectrum, contours");
  for (auto* sub : {profile, stability, essential, oracle, reproduce}) add_common(sub, o);
  add_contour(stability, o);
  reproduce->add_flag("--full-scale", o.full_scale, "use the (5, 1.9e4) semi-annulus with 1e7 nodes");
  reproduce->add_flag("--oracle", o.with_oracle, "cross-check the contours against the oracle");
  for (auto* sub : {oracle, reproduce}) {
    sub->add_option("--oracle-N", o.oracle_N, "coarse grid size (the fine grid doubles it)")->capture_default_str();
    sub->add_option("--oracle-L", o.oracle_L, "oracle half-length")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*reproduce) return cmd_reproduce(o);
    const RunConfig c = make_config(o);
    if (*profile) return cmd_profile(c);
    if (*stability) return cmd_stability(c);
    if (*essential) return cmd_essential(c);
    if (*oracle) return cmd_oracle(c);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.is_config() ? kConfig : kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumerical;
  }
  return kConfig;
}
