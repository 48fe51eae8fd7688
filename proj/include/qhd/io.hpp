#pragma once

// Config (flat JSON) and CSV/JSON emitters. Every number is written with 17
// significant digits.

#include <nlohmann/json.hpp>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "qhd/error.hpp"
#include "qhd/linearize.hpp"
#include "qhd/model.hpp"
#include "qhd/profile.hpp"

namespace qhd::io {

using json = nlohmann::json;

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

/// Builds ShockParams from gamma, mu, k, s and either {p_minus, p_plus} or {A, B}.
inline ShockParams params_from_json(const json& j) {
  const auto get = [&](const char* key) -> double {
    if (!j.contains(key)) throw Error(Errc::invalid_parameters, std::string("missing key '") + key + "'");
    if (!j.at(key).is_number()) throw Error(Errc::invalid_parameters, std::string("key '") + key + "' must be a number");
    return j.at(key).get<double>();
  };
  const bool by_states = j.contains("p_minus") || j.contains("p_plus");
  const bool by_ab = j.contains("A") || j.contains("B");
  if (by_states == by_ab)
    throw Error(Errc::invalid_parameters, "give exactly one of {p_minus, p_plus} or {A, B}");
  const double gamma = get("gamma"), mu = get("mu"), k = get("k"), s = get("s");
  if (by_states) return ShockParams::from_end_states(gamma, mu, k, s, get("p_minus"), get("p_plus"));
  return ShockParams::from_AB(gamma, mu, k, s, get("A"), get("B"));
}

inline json params_to_json(const ShockParams& p) {
  return {{"gamma", p.gamma}, {"mu", p.mu},           {"k", p.k},
          {"s", p.s},         {"p_minus", p.p_minus}, {"p_plus", p.p_plus},
          {"j_minus", p.j_minus}, {"j_plus", p.j_plus}, {"A", p.A}, {"B", p.B}};
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::invalid_parameters, "cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_parameters, "config file " + path.string() + ": " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::invalid_parameters, "cannot write " + path.string());
  out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

/// Column-major table with a header row.
inline std::string csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += "\n";
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ",";
      out += num(columns[c][r]);
    }
    out += "\n";
  }
  return out;
}

inline std::string profile_csv(const ProfileSolution& sol) {
  return csv({"y", "P", "Q", "J"}, {sol.y, sol.P, sol.Q, sol.J});
}

inline std::string essential_csv(const EssentialCurves& c) {
  std::vector<double> r1, i1, r2, i2;
  for (std::size_t i = 0; i < c.xi.size(); ++i) {
    r1.push_back(c.lambda1[i].real());
    i1.push_back(c.lambda1[i].imag());
    r2.push_back(c.lambda2[i].real());
    i2.push_back(c.lambda2[i].imag());
  }
  return csv({"xi", "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2"}, {c.xi, r1, i1, r2, i2});
}

inline std::string resolvent_csv(std::span<const ResolventAudit> rows) {
  std::vector<double> re, im, sup, arg, bound, pass;
  for (const auto& a : rows) {
    re.push_back(a.lambda.real());
    im.push_back(a.lambda.imag());
    sup.push_back(a.sup_norm);
    arg.push_back(a.argsup_xi);
    bound.push_back(a.bound);
    pass.push_back(a.pass ? 1.0 : 0.0);
  }
  return csv({"re_lambda", "im_lambda", "sup_norm", "argsup_xi", "bound", "pass"},
             {re, im, sup, arg, bound, pass});
}

inline std::string trace_csv(std::span<const std::complex<double>> nodes,
                             std::span<const std::complex<double>> values) {
  std::vector<double> rl, il, re, ie, idx;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    rl.push_back(nodes[i].real());
    il.push_back(nodes[i].imag());
    re.push_back(values[i].real());
    ie.push_back(values[i].imag());
    idx.push_back(static_cast<double>(i));
  }
  return csv({"re_lambda", "im_lambda", "re_E", "im_E", "node"}, {rl, il, re, ie, idx});
}

inline std::string eigenvalue_csv(std::span<const std::complex<double>> w, std::size_t N, double L) {
  std::vector<double> re, im, n, l;
  for (const auto& z : w) {
    re.push_back(z.real());
    im.push_back(z.imag());
    n.push_back(static_cast<double>(N));
    l.push_back(L);
  }
  return csv({"re", "im", "N", "L"}, {re, im, n, l});
}

}  // namespace qhd::io
