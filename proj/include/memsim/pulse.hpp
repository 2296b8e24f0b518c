#pragma once

#include <complex>
#include <optional>
#include <string>

namespace memsim {

enum class PulseShape { gaussian, chs, square };

// Carrier frequency, either one of the scheme's named transitions or an
// explicit offset from f0.
enum class FrequencyLabel { f0, fplus, fminus, explicit_offset };

// Optical pulse in the rotating frame of its own carrier.
//
// Gaussian: t0 is the peak, width is the FWHM of the field envelope.
// CHS / square: t0 is the midpoint, width is the full duration.
// The drive is either a peak Rabi frequency (stored as Omega / 2 pi, in Hz)
// or a peak optical power (W) that needs a power-to-Rabi constant before it
// can be integrated.
struct Pulse {
  std::string name;
  PulseShape shape{PulseShape::gaussian};
  double t0{0.0};
  double width{0.0};
  double freq_offset{0.0};
  FrequencyLabel freq_label{FrequencyLabel::explicit_offset};
  double chirp_bandwidth{0.0};
  // +1 sweeps low to high frequency, -1 is the time-reversed sweep.
  int chirp_direction{+1};
  double phase{0.0};
  std::optional<double> rabi_hz;
  std::optional<double> peak_power;
  int direction{+1};

  void validate() const;

  // Time interval the integrator covers.
  double integration_start() const;
  double integration_end() const;
  // Interval that readout windows must not overlap.
  double support_start() const;
  double support_end() const;

  // Peak Rabi frequency in rad/s; throws ConfigError when only a power is
  // known.
  double rabi() const;

  friend bool operator==(const Pulse&, const Pulse&) = default;
};

// sech steepness and dimensionless chirp parameter of a CHS pulse.
struct ChsParameters {
  double beta;  // 1/s
  double mu;
};
ChsParameters chs_parameters(const Pulse& pulse);

// Peak-normalised complex envelope at time t (phase and chirp phase
// included).
std::complex<double> envelope(const Pulse& pulse, double t);

// Instantaneous carrier offset of the pulse at time t, in Hz.
double instantaneous_frequency(const Pulse& pulse, double t);

// Drive from power: peak Rabi frequency (rad/s) = kappa * sqrt(peak_power).
Pulse with_power_calibration(Pulse pulse, double kappa);

// Pulse whose propagator inverts `pulse` up to conjugation of the
// coherence: reversed in time about t0 with phase and chirp negated.
Pulse time_reversed(Pulse pulse);

std::string to_string(PulseShape shape);

}  // namespace memsim
