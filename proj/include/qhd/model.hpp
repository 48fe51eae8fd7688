#pragma once

// Shock parameters for the rescaled quantum hydrodynamics system, the reduced
// flux f(P), its potential F(P) and the existence/monotonicity predicates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "qhd/error.hpp"

namespace qhd {

/// Parameters of a traveling shock in the frame y = (x - s t) / eps.
///
/// Construct through `from_end_states` or `from_AB`; both fill the derived
/// momenta and Rankine-Hugoniot constants and validate the invariants.
struct ShockParams {
  double gamma = 1.0;
  double mu = 1.0;
  double k = 1.0;
  double s = 0.0;
  double p_minus = 1.0;
  double p_plus = 1.0;
  double j_minus = 0.0;
  double j_plus = 0.0;
  double A = 0.0;
  double B = 0.0;

  static ShockParams from_end_states(double gamma, double mu, double k, double s,
                                     double p_minus, double p_plus);
  static ShockParams from_AB(double gamma, double mu, double k, double s, double A,
                             double B);

  double as_plus_b() const { return A * s + B; }
};

struct RhConstants {
  double A;
  double B;
  double j_minus;
  double j_plus;
};

struct EndStates {
  double p_minus;
  double p_plus;
};

struct ExistenceReport {
  bool criterion_applicable = false;  // s > 0 with P+ < P-, or s < 0 with P- < P+
  bool profile_exists = false;
  bool non_monotone = false;
  bool oscillation_applicable = false;  // f' at the inner state is negative
  double f1_max = 0.0;
  double f1_argmax = 0.0;
  double threshold_lhs = 0.0;
  double threshold_rhs = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(Errc::invalid_parameters, std::string(name) + " must be positive and finite");
}

inline void validate_physical(double gamma, double mu, double k) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma))
    throw Error(Errc::invalid_parameters, "gamma must satisfy gamma >= 1");
  require_positive(mu, "mu");
  require_positive(k, "k");
}

// Difference quotient (b^e - a^e) / (b - a), continuous at b == a.
inline double power_quotient(double a, double b, double e) {
  const double scale = std::max(a, b);
  if (std::abs(b - a) <= 1e-9 * scale) {
    const double m = 0.5 * (a + b);
    return e * std::pow(m, e - 1.0);
  }
  return (std::pow(b, e) - std::pow(a, e)) / (b - a);
}

inline double momentum_flux(double p, double j, double gamma) {
  return j * j / p + std::pow(p, gamma);
}

}  // namespace detail

/// f(P) = P^gamma - (A s + B) + A^2 / P.
inline double flux_f(double P, const ShockParams& p) {
  if (!(P > 0.0)) throw Error(Errc::domain, "flux_f requires P > 0");
  return std::pow(P, p.gamma) - p.as_plus_b() + p.A * p.A / P;
}

/// The same flux written through the end states only.
inline double flux_f_end_states(double P, double p_minus, double p_plus, double gamma) {
  if (!(P > 0.0)) throw Error(Errc::domain, "flux_f requires P > 0");
  const double pressure_quot = detail::power_quotient(p_minus, p_plus, gamma);
  const double energy_quot = detail::power_quotient(p_minus, p_plus, gamma + 1.0);
  return std::pow(P, gamma) + p_minus * p_plus / P * pressure_quot - energy_quot;
}

inline double flux_df(double P, const ShockParams& p) {
  if (!(P > 0.0)) throw Error(Errc::domain, "flux_df requires P > 0");
  return p.gamma * std::pow(P, p.gamma - 1.0) - p.A * p.A / (P * P);
}

/// F(P) = P^{gamma+1}/(gamma+1) - (A s + B) P + A^2 ln P; F' = f.
inline double potential_F(double P, const ShockParams& p) {
  if (!(P > 0.0)) throw Error(Errc::domain, "potential_F requires P > 0");
  return std::pow(P, p.gamma + 1.0) / (p.gamma + 1.0) - p.as_plus_b() * P +
         p.A * p.A * std::log(P);
}

/// F1(P) = F(P) - (s mu P / k)^2 - F(reference); reference is P- for s > 0
/// and P+ for the mirrored branch.
inline double potential_F1(double P, const ShockParams& p, double reference) {
  const double q = p.s * p.mu * P / p.k;
  return potential_F(P, p) - q * q - potential_F(reference, p);
}

inline RhConstants rh_constants(double p_minus, double p_plus, double s, double gamma) {
  detail::require_positive(p_minus, "p_minus");
  detail::require_positive(p_plus, "p_plus");
  if (p_minus == p_plus) throw Error(Errc::invalid_parameters, "end states must differ");
  const double a2 = p_minus * p_plus * detail::power_quotient(p_minus, p_plus, gamma);
  if (a2 < 0.0) throw Error(Errc::non_admissible_states, "A^2 is negative");
  const double as_b = detail::power_quotient(p_minus, p_plus, gamma + 1.0);
  const double A = (s < 0.0 ? -1.0 : 1.0) * std::sqrt(a2);
  const double B = as_b - A * s;
  return {A, B, s * p_minus - A, s * p_plus - A};
}

/// Positive roots of f for given (A, B); the larger one is P- when s > 0.
inline EndStates endstates_from_AB(double A, double B, double s, double gamma) {
  if (!(gamma >= 1.0)) throw Error(Errc::invalid_parameters, "gamma must satisfy gamma >= 1");
  ShockParams p;
  p.gamma = gamma;
  p.s = s;
  p.A = A;
  p.B = B;
  const auto f = [&](double P) { return flux_f(P, p); };

  constexpr int scan = 10000;
  const double lo = std::log(1e-6), hi = std::log(1e3);
  std::vector<double> roots;
  double x0 = std::exp(lo), f0 = f(x0);
  for (int i = 1; i < scan; ++i) {
    const double x1 = std::exp(lo + (hi - lo) * i / (scan - 1));
    const double f1 = f(x1);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = f(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
  if (roots.size() != 2)
    throw Error(Errc::no_shock, "reduced flux has " + std::to_string(roots.size()) +
                                    " sign changes on the scan grid, expected 2");
  const double small = std::min(roots[0], roots[1]);
  const double large = std::max(roots[0], roots[1]);
  return s > 0.0 ? EndStates{large, small} : EndStates{small, large};
}

namespace detail {

inline void validate_rankine_hugoniot(const ShockParams& p) {
  const double scale = std::pow(std::max(p.p_minus, p.p_plus), p.gamma);
  const double tol = 1e-10 * (1.0 + std::abs(p.s)) * scale;
  const double mass = p.j_plus - p.j_minus - p.s * (p.p_plus - p.p_minus);
  const double momentum = momentum_flux(p.p_plus, p.j_plus, p.gamma) -
                          momentum_flux(p.p_minus, p.j_minus, p.gamma) -
                          p.s * (p.j_plus - p.j_minus);
  if (!(std::abs(mass) < tol) || !(std::abs(momentum) < tol))
    throw Error(Errc::non_admissible_states, "Rankine-Hugoniot residual above tolerance");
  for (double P : {p.p_minus, p.p_plus}) {
    const double terms = std::max({std::pow(P, p.gamma), std::abs(p.as_plus_b()), p.A * p.A / P});
    if (!(std::abs(flux_f(P, p)) <= 1e-10 * terms))
      throw Error(Errc::non_admissible_states, "end state is not a root of the reduced flux");
  }
}

}  // namespace detail

inline ShockParams ShockParams::from_end_states(double gamma, double mu, double k, double s,
                                                double p_minus, double p_plus) {
  detail::validate_physical(gamma, mu, k);
  const RhConstants rh = rh_constants(p_minus, p_plus, s, gamma);
  ShockParams p{gamma, mu, k, s, p_minus, p_plus, rh.j_minus, rh.j_plus, rh.A, rh.B};
  detail::validate_rankine_hugoniot(p);
  return p;
}

inline ShockParams ShockParams::from_AB(double gamma, double mu, double k, double s, double A,
                                        double B) {
  detail::validate_physical(gamma, mu, k);
  const EndStates e = endstates_from_AB(A, B, s, gamma);
  ShockParams p{gamma, mu, k, s, e.p_minus, e.p_plus, s * e.p_minus - A, s * e.p_plus - A, A, B};
  detail::validate_rankine_hugoniot(p);
  return p;
}

/// Existence and monotonicity predicates for the heteroclinic profile.
///
/// For s > 0 and P+ < P- the potential F1 is scanned on a log-spaced grid in
/// [1e-8 P+, P+); the A^2 ln P term sends F1 to -infinity at 0 so nothing is
/// missed below the floor. The mirrored s < 0 branch scans (0, P-) instead.
inline ExistenceReport check_existence(const ShockParams& p, int scan_points = 4096) {
  if (scan_points < 1000)
    throw Error(Errc::invalid_parameters, "existence scan needs at least 1000 points");
  ExistenceReport r;
  const bool forward = p.s > 0.0 && p.p_plus < p.p_minus;
  const bool mirrored = p.s < 0.0 && p.p_minus < p.p_plus;
  r.threshold_lhs = std::abs(p.s) * p.mu / p.k;
  if (!forward && !mirrored) return r;
  r.criterion_applicable = true;

  const double inner = forward ? p.p_plus : p.p_minus;
  const double reference = forward ? p.p_minus : p.p_plus;
  const double lo = std::log(1e-8 * inner), hi = std::log(inner);
  r.f1_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan_points; ++i) {
    const double P = std::exp(lo + (hi - lo) * i / scan_points);
    const double v = potential_F1(P, p, reference);
    if (v > r.f1_max) {
      r.f1_max = v;
      r.f1_argmax = P;
    }
  }
  r.profile_exists = r.f1_max <= 1e-12;

  const double slope = flux_df(inner, p);
  if (slope < 0.0) {
    r.oscillation_applicable = true;
    r.threshold_rhs = std::sqrt(-2.0 * slope);
    r.non_monotone = r.profile_exists && r.threshold_lhs < r.threshold_rhs;
  }
  return r;
}

}  // namespace qhd
