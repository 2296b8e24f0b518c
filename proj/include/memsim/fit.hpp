#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "memsim/spectral.hpp"

namespace memsim {

struct FitResult {
  std::map<std::string, double> params;
  std::map<std::string, double> std_errors;
  double residual_norm{0.0};
  bool converged{false};
  int iterations{0};
  std::vector<std::string> warnings;

  double operator[](const std::string& name) const { return params.at(name); }
  double error(const std::string& name) const { return std_errors.at(name); }
};

// I(phi) = I_max / 2 [1 + V sin(phi + phi1)], V constrained to [0, 1].
// Params: I_max, V, phi1.
FitResult fit_sinusoid(std::span<const double> phases,
                       std::span<const double> intensities);

// Two-pulse echo amplitude A0 exp(-2 tau1 / T2), fitted as a line in
// log space. Params: A0, T2.
FitResult fit_exp_decay(std::span<const double> times,
                        std::span<const double> amplitudes);

// ROSE efficiency eta0 exp(-4 tau / T2eff), fitted as a line in log space.
// Params: eta0, T2eff.
FitResult fit_rose_decay(std::span<const double> taus,
                         std::span<const double> efficiencies);

// A0 exp(-(tau / T2star)^2). Params: A0, T2star.
FitResult fit_gaussian_decay(std::span<const double> taus,
                             std::span<const double> amplitudes);

// peak_od exp(-4 ln2 (d - center)^2 / fwhm^2). Params: peak_od, center,
// fwhm (Hz).
FitResult fit_gaussian_profile(const AbsorptionProfile& profile);

// key=value report: param.<name>, stderr.<name>, residual, converged.
void write_fit_report(std::ostream& out, const FitResult& fit);
FitResult read_fit_report(std::istream& in);

}  // namespace memsim
