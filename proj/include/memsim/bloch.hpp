#pragma once

#include <cstddef>

#include "memsim/pulse.hpp"

namespace memsim {

// (u, v) coherence and w inversion; w = -1 is the ground state.
struct BlochVector {
  double u{0.0};
  double v{0.0};
  double w{-1.0};

  double norm() const;
  BlochVector conjugate() const { return {u, -v, w}; }

  static BlochVector ground() { return {0.0, 0.0, -1.0}; }
};

// Fixed-step RK4 over the pulse's integration interval, checked against a
// run at half the step. Detuning is the atomic transition minus the pulse
// carrier, in Hz.
//
//   du/dt = -D(t) v - W sin(phi) w
//   dv/dt =  D(t) u + W cos(phi) w
//   dw/dt = -W cos(phi) v + W sin(phi) u
//
// with D(t) = 2 pi (detuning - chirp(t)) and W = rabi * |envelope(t)|.
// Fixed-step RK4 starting at kBlochSteps steps over the integration window;
// the step is halved until two successive results agree within
// kBlochTolerance. Throws IntegrationError past kBlochMaxSteps.
BlochVector bloch_integrate(const Pulse& pulse, double detuning_hz,
                            const BlochVector& initial);

inline constexpr std::size_t kBlochSteps = 4096;
inline constexpr std::size_t kBlochMaxSteps = std::size_t{1} << 20;
inline constexpr double kBlochTolerance = 1e-6;

struct TransferEfficiency {
  double value{0.0};
  // Set when the sampled band extends beyond the pulse's chirp range.
  bool band_exceeds_chirp{false};
};

// Mean of (1 + w)/2 over `samples` detunings spread uniformly over
// [band_lo, band_hi], starting from the ground state. A degenerate band
// (lo == hi) evaluates the single detuning.
TransferEfficiency transfer_efficiency(const Pulse& pulse, double band_lo_hz,
                                       double band_hi_hz, std::size_t samples);

// Power-to-Rabi constant kappa (rad/s/sqrt(W)) for which the pulse,
// driven at its configured power, reaches `target` transfer efficiency
// over the band. Searches the first rising branch of the efficiency curve.
double calibrate_power_to_rabi(const Pulse& pulse, double band_lo_hz,
                               double band_hi_hz, std::size_t samples,
                               double target);

}  // namespace memsim
