#include "memsim/pulse.hpp"

#include <cmath>
#include <numbers>

#include "memsim/errors.hpp"

namespace memsim {

namespace {

// sech(beta * duration / 2) ~ 1e-2 at the truncation points.
constexpr double kChsTruncation = 10.6;
constexpr double kGaussianSupportFwhm = 3.0;

}  // namespace

std::string to_string(PulseShape shape) {
  switch (shape) {
    case PulseShape::gaussian: return "gaussian";
    case PulseShape::chs: return "chs";
    case PulseShape::square: return "square";
  }
  return "?";
}

void Pulse::validate() const {
  if (!(width > 0.0) || !std::isfinite(width))
    throw ConfigError("pulse '" + name + "': width must be positive");
  if (!(chirp_bandwidth >= 0.0))
    throw ConfigError("pulse '" + name + "': chirp bandwidth must be >= 0");
  if (chirp_bandwidth > 0.0 && shape != PulseShape::chs)
    throw ConfigError("pulse '" + name + "': only chs pulses can be chirped");
  if (direction != 1 && direction != -1)
    throw ConfigError("pulse '" + name + "': direction must be +1 or -1");
  if (chirp_direction != 1 && chirp_direction != -1)
    throw ConfigError("pulse '" + name + "': chirp direction must be +1 or -1");
  if (rabi_hz && !(*rabi_hz >= 0.0))
    throw ConfigError("pulse '" + name + "': rabi frequency must be >= 0");
  if (peak_power && !(*peak_power >= 0.0))
    throw ConfigError("pulse '" + name + "': power must be >= 0");
}

double Pulse::integration_start() const {
  return shape == PulseShape::gaussian ? t0 - kGaussianSupportFwhm * width
                                       : t0 - 0.5 * width;
}

double Pulse::integration_end() const {
  return shape == PulseShape::gaussian ? t0 + kGaussianSupportFwhm * width
                                       : t0 + 0.5 * width;
}

double Pulse::support_start() const {
  switch (shape) {
    case PulseShape::gaussian: return t0 - kGaussianSupportFwhm * width;
    case PulseShape::chs: return t0 - width;
    case PulseShape::square: return t0 - 0.5 * width;
  }
  return t0;
}

double Pulse::support_end() const { return 2.0 * t0 - support_start(); }

double Pulse::rabi() const {
  if (rabi_hz) return 2.0 * std::numbers::pi * *rabi_hz;
  throw ConfigError("pulse '" + name +
                    "': drive given as power; apply a power calibration first");
}

ChsParameters chs_parameters(const Pulse& pulse) {
  const double beta = kChsTruncation / pulse.width;
  return {beta, std::numbers::pi * pulse.chirp_bandwidth / beta};
}

std::complex<double> envelope(const Pulse& pulse, double t) {
  const double dt = t - pulse.t0;
  switch (pulse.shape) {
    case PulseShape::gaussian: {
      const double a = std::exp(-4.0 * std::numbers::ln2 * dt * dt /
                                (pulse.width * pulse.width));
      return std::polar(a, pulse.phase);
    }
    case PulseShape::chs: {
      const auto [beta, mu] = chs_parameters(pulse);
      const double x = beta * dt;
      // ln cosh(x) without overflow for large |x|.
      const double ax = std::abs(x);
      const double lncosh =
          ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
      const double chirp_phase = pulse.chirp_direction * mu * lncosh;
      return std::polar(1.0 / std::cosh(x), pulse.phase + chirp_phase);
    }
    case PulseShape::square:
      return std::abs(dt) <= 0.5 * pulse.width
                 ? std::polar(1.0, pulse.phase)
                 : std::complex<double>{0.0, 0.0};
  }
  return {};
}

double instantaneous_frequency(const Pulse& pulse, double t) {
  if (pulse.shape != PulseShape::chs || pulse.chirp_bandwidth == 0.0)
    return 0.0;
  const auto [beta, mu] = chs_parameters(pulse);
  return pulse.chirp_direction * mu * beta * std::tanh(beta * (t - pulse.t0)) /
         (2.0 * std::numbers::pi);
}

Pulse with_power_calibration(Pulse pulse, double kappa) {
  if (!pulse.peak_power)
    throw ConfigError("pulse '" + pulse.name + "': no power to calibrate");
  if (!(kappa >= 0.0)) throw ConfigError("power calibration must be >= 0");
  pulse.rabi_hz =
      kappa * std::sqrt(*pulse.peak_power) / (2.0 * std::numbers::pi);
  return pulse;
}

Pulse time_reversed(Pulse pulse) {
  pulse.phase = -pulse.phase;
  pulse.chirp_direction = -pulse.chirp_direction;
  return pulse;
}

}  // namespace memsim
