#include "memsim/derived.hpp"

#include <cmath>
#include <numbers>

#include "memsim/errors.hpp"

namespace memsim {

double deduce_eta_t(double eta0, double od) {
  if (!(eta0 > 0.0 && eta0 <= 1.0))
    throw DomainError("deduce_eta_t: eta0 must lie in (0, 1]");
  if (!(od > 0.0)) throw DomainError("deduce_eta_t: OD must be positive");
  const double eta_t = std::sqrt(eta0 * std::exp(od) / (od * od));
  if (eta_t > 1.0 + 1e-12)
    throw InconsistentInputsError("deduce_eta_t: eta_T = " + std::to_string(eta_t) +
                                  " exceeds 1");
  return std::min(eta_t, 1.0);
}

double gamma_inh_from_t2star(double t2star) {
  if (!(t2star > 0.0)) throw DomainError("gamma_inh_from_t2star: T2* must be positive");
  if (std::isinf(t2star)) return 0.0;
  return std::sqrt(2.0 * std::numbers::ln2) / std::numbers::pi / t2star;
}

double t2star_from_gamma_inh(double gamma_inh_hz) {
  if (!(gamma_inh_hz > 0.0))
    throw DomainError("t2star_from_gamma_inh: linewidth must be positive");
  return std::sqrt(2.0 * std::numbers::ln2) / std::numbers::pi / gamma_inh_hz;
}

double focal_spot_diameter(double focal_length, double wavelength,
                           double beam_diameter) {
  if (!(focal_length > 0.0 && wavelength > 0.0 && beam_diameter > 0.0))
    throw DomainError("focal_spot_diameter: all lengths must be positive");
  return 2.36 * focal_length * wavelength / (std::numbers::pi * beam_diameter);
}

}  // namespace memsim
