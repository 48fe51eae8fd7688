#pragma once

#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qhd {

enum class Errc {
  // configuration problems (exit code 2)
  invalid_parameters,
  non_admissible_states,
  no_shock,
  geometry,
  not_subsonic,
  // numerical problems (exit code 3)
  domain,
  degenerate_fixed_point,
  profile_blow_up,
  profile_not_converged,
  near_essential_spectrum,
  integrator_failure,
  contour_crosses_spectrum,
  possible_zero_on_contour,
  insufficient_resolution,
  ill_conditioned,
  eigensolver_failure,
  size,
};

constexpr bool is_config_error(Errc e) {
  return e == Errc::invalid_parameters || e == Errc::non_admissible_states ||
         e == Errc::no_shock || e == Errc::geometry || e == Errc::not_subsonic;
}

constexpr const char* to_string(Errc e) {
  switch (e) {
    case Errc::invalid_parameters: return "invalid-parameters";
    case Errc::non_admissible_states: return "non-admissible-states";
    case Errc::no_shock: return "no-shock";
    case Errc::geometry: return "geometry";
    case Errc::not_subsonic: return "not-subsonic";
    case Errc::domain: return "domain";
    case Errc::degenerate_fixed_point: return "degenerate-fixed-point";
    case Errc::profile_blow_up: return "profile-blow-up";
    case Errc::profile_not_converged: return "profile-not-converged";
    case Errc::near_essential_spectrum: return "near-essential-spectrum";
    case Errc::integrator_failure: return "integrator-failure";
    case Errc::contour_crosses_spectrum: return "contour-crosses-spectrum";
    case Errc::possible_zero_on_contour: return "possible-zero-on-contour";
    case Errc::insufficient_resolution: return "insufficient-resolution";
    case Errc::ill_conditioned: return "ill-conditioned";
    case Errc::eigensolver_failure: return "eigensolver-failure";
    case Errc::size: return "size";
  }
  return "unknown";
}

/// Single exception type for the library; the code says what went wrong.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }
  bool is_config() const noexcept { return is_config_error(code_); }

 private:
  Errc code_;
};

inline std::string describe(std::complex<double> z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace qhd
