#include "memsim/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "memsim/errors.hpp"
#include "memsim/kernels.hpp"

namespace memsim {

double BlochVector::norm() const { return std::sqrt(u * u + v * v + w * w); }

namespace {

double drive_amplitude(const Pulse& pulse, double t) {
  const double dt = t - pulse.t0;
  switch (pulse.shape) {
    case PulseShape::gaussian:
      return std::exp(-4.0 * std::numbers::ln2 * dt * dt /
                      (pulse.width * pulse.width));
    case PulseShape::chs: {
      const double beta = chs_parameters(pulse).beta;
      return 1.0 / std::cosh(beta * dt);
    }
    case PulseShape::square:
      // Slack keeps the window end points inside despite rounding in t.
      return std::abs(dt) <= 0.5 * pulse.width * (1.0 + 1e-9) ? 1.0 : 0.0;
  }
  return 0.0;
}

struct Rhs {
  const Pulse& pulse;
  double rabi;
  double cos_phi;
  double sin_phi;
  double detuning_rad;

  BlochVector operator()(double t, const BlochVector& r) const {
    const double w_drive = rabi * drive_amplitude(pulse, t);
    const double d = detuning_rad - 2.0 * std::numbers::pi *
                                        instantaneous_frequency(pulse, t);
    const double wx = w_drive * cos_phi;
    const double wy = w_drive * sin_phi;
    return {-d * r.v - wy * r.w, d * r.u + wx * r.w, -wx * r.v + wy * r.u};
  }
};

BlochVector axpy(const BlochVector& r, double h, const BlochVector& k) {
  return {r.u + h * k.u, r.v + h * k.v, r.w + h * k.w};
}

BlochVector rk4(const Rhs& f, double t_start, double t_end, std::size_t steps,
                BlochVector r) {
  const double h = (t_end - t_start) / static_cast<double>(steps);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = t_start + static_cast<double>(n) * h;
    const BlochVector k1 = f(t, r);
    const BlochVector k2 = f(t + 0.5 * h, axpy(r, 0.5 * h, k1));
    const BlochVector k3 = f(t + 0.5 * h, axpy(r, 0.5 * h, k2));
    const BlochVector k4 = f(t + h, axpy(r, h, k3));
    r.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    r.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    r.w += h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
  }
  return r;
}

}  // namespace

BlochVector bloch_integrate(const Pulse& pulse, double detuning_hz,
                            const BlochVector& initial) {
  pulse.validate();
  if (initial.norm() > 1.0 + 1e-9)
    throw DomainError("bloch_integrate: initial vector longer than 1");
  const double rabi = pulse.rabi();
  if (rabi == 0.0) return initial;

  const Rhs f{pulse, rabi, std::cos(pulse.phase), std::sin(pulse.phase),
              2.0 * std::numbers::pi * detuning_hz};
  const double a = pulse.integration_start();
  const double b = pulse.integration_end();
  // Halve the step until two successive results agree.
  std::size_t steps = kBlochSteps;
  BlochVector coarse = rk4(f, a, b, steps, initial);
  double disagreement = 0.0;
  while (2 * steps <= kBlochMaxSteps) {
    steps *= 2;
    const BlochVector fine = rk4(f, a, b, steps, initial);
    disagreement =
        std::max({std::abs(coarse.u - fine.u), std::abs(coarse.v - fine.v),
                  std::abs(coarse.w - fine.w)});
    if (disagreement <= kBlochTolerance) return fine;
    coarse = fine;
  }
  throw IntegrationError("bloch_integrate: step size underflow for pulse '" + pulse.name +
                         "' (last halving changed the result by " +
                         std::to_string(disagreement) + ")");
}

TransferEfficiency transfer_efficiency(const Pulse& pulse, double band_lo_hz,
                                       double band_hi_hz,
                                       std::size_t samples) {
  if (samples < 3)
    throw ConfigError("transfer_efficiency: need at least 3 samples");
  if (band_hi_hz < band_lo_hz)
    throw ConfigError("transfer_efficiency: band upper edge below lower edge");

  std::vector<double> detunings(samples);
  const double step = (band_hi_hz - band_lo_hz) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i)
    detunings[i] = band_lo_hz + static_cast<double>(i) * step;

  const auto finals =
      kernels::omp::propagate(pulse, detunings, BlochVector::ground());
  double sum = 0.0;
  for (const auto& r : finals) sum += 0.5 * (1.0 + r.w);

  TransferEfficiency result;
  result.value = std::clamp(sum / static_cast<double>(samples), 0.0, 1.0);
  const double half_chirp =
      pulse.shape == PulseShape::chs ? 0.5 * pulse.chirp_bandwidth : 0.0;
  result.band_exceeds_chirp =
      band_lo_hz < -half_chirp || band_hi_hz > half_chirp;
  return result;
}

double calibrate_power_to_rabi(const Pulse& pulse, double band_lo_hz,
                               double band_hi_hz, std::size_t samples,
                               double target) {
  if (!pulse.peak_power || !(*pulse.peak_power > 0.0))
    throw ConfigError("calibrate_power_to_rabi: pulse needs a positive power");
  if (!(target > 0.0 && target < 1.0))
    throw ConfigError("calibrate_power_to_rabi: target must lie in (0, 1)");

  auto efficiency = [&](double kappa) {
    return transfer_efficiency(with_power_calibration(pulse, kappa),
                               band_lo_hz, band_hi_hz, samples)
        .value;
  };

  // Walk up from a weak drive (pulse area ~ 0.05 rad) until the target is
  // bracketed, then bisect.
  const double root_power = std::sqrt(*pulse.peak_power);
  double lo = 0.05 / (pulse.width * root_power);
  double eta_lo = efficiency(lo);
  if (eta_lo >= target)
    throw ConfigError("calibrate_power_to_rabi: target reached at vanishing drive");
  double hi = lo;
  double eta_hi = eta_lo;
  constexpr double kGrowth = 1.15;
  constexpr int kMaxGrowthSteps = 200;
  int step = 0;
  for (; step < kMaxGrowthSteps; ++step) {
    hi = lo * kGrowth;
    eta_hi = efficiency(hi);
    if (eta_hi >= target) break;
    if (eta_hi < eta_lo - 1e-3)
      throw ConfigError(
          "calibrate_power_to_rabi: efficiency peaks below the target");
    lo = hi;
    eta_lo = eta_hi;
  }
  if (step == kMaxGrowthSteps)
    throw ConfigError("calibrate_power_to_rabi: target not reached");

  for (int i = 0; i < 60 && (hi - lo) > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (efficiency(mid) >= target)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace memsim
