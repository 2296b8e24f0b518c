#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memsim/pulse.hpp"
#include "memsim/spectral.hpp"

namespace memsim {

// Phenomenological constants of one memory configuration. Times in s,
// frequencies in Hz.
struct MemoryParams {
  double od{1.75};
  double t2{202e-6};
  double t2eff{37.4e-6};
  double t2star{3.3e-6};
  double delta{125e3};
  double bandwidth{2e6};
  double eta_t{0.80};

  void validate() const;
};

struct EchoResult {
  double time{0.0};
  std::complex<double> amplitude{0.0, 0.0};
  // |amplitude|^2; a silenced echo keeps its would-be value here.
  double efficiency{0.0};
  bool silenced{false};
  int wavevector{1};
  std::vector<std::string> warnings;

  // Intensity actually radiated: zero when silenced.
  double emitted_intensity() const { return silenced ? 0.0 : efficiency; }
};

// Normalised collective phase of the ions in [band_lo, band_hi] after a
// free evolution time t, weighted by their absorption.
std::complex<double> dephasing_factor(const AbsorptionProfile& profile,
                                      double band_lo_hz, double band_hi_hz,
                                      double t);

// Re-emission of a comb of period params.delta at t = 1/delta. Efficiency
// combines the comb's absorption d^2 exp(-d) (d the band-averaged comb od
// above the background), its rephasing |dephasing_factor|^2, the
// background loss exp(-d0) and the optical decay exp(-2t/T2).
EchoResult afc_echo(const AbsorptionProfile& profile, const MemoryParams& params,
                    const Pulse& input);

// Efficiency of a square-tooth comb in closed form; used as a test oracle
// and by calibration tooling.
double afc_efficiency_square_comb(double tooth_od, double finesse,
                                  double background_od);

// Spin-wave storage penalty on an AFC efficiency.
double spin_wave_efficiency(double afc_efficiency, double eta_control_1,
                            double eta_control_2, double tau_s, double t2star);

// Spin-wave AFC echo at tau_s + 1/delta. Control transfer efficiencies are
// evaluated over the comb band with `samples` detunings.
EchoResult spin_wave_echo(const AbsorptionProfile& profile,
                          const MemoryParams& params,
                          const std::pair<Pulse, Pulse>& controls, double tau_s,
                          const Pulse& input, std::size_t samples = 41);

// eta_T^2 OD^2 exp(-OD) exp(-4 tau / T2eff)
double rose_efficiency(double eta_t, double od, double tau, double t2eff);

struct RoseResult {
  EchoResult primary;    // at 2 t1, silenced when phase mismatched
  EchoResult secondary;  // at 2 tau
  // Co-propagating rephasing leaves the inverted medium radiating on the
  // input mode.
  bool inversion_noise_warning{false};
};

RoseResult rose_echo(const MemoryParams& params, double tau,
                     const std::pair<Pulse, Pulse>& rephasing,
                     int input_direction);

EchoResult two_pulse_echo(const MemoryParams& params, double tau1);

struct PhaseMatch {
  int wavevector{0};
  bool emitted{false};
};

// k <- 2 k_pulse - k after each rephasing pulse, starting from k_in.
PhaseMatch phase_matching(int input_direction, std::span<const int> pulse_directions);

// |a_echo + a_ref exp(i delta_phi)|^2
double interfere(const EchoResult& echo, std::complex<double> reference_amplitude,
                 double delta_phi);

// Fringe visibility for echo/reference amplitude ratio r.
double visibility_from_ratio(double r);
// Smaller of the two amplitude ratios giving visibility v.
double ratio_from_visibility(double v);

// Rows of t_us,re_amplitude,im_amplitude,intensity.
void write_echo_csv(std::ostream& out, std::span<const EchoResult> echoes);

}  // namespace memsim
