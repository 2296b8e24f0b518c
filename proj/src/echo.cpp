#include "memsim/echo.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "memsim/bloch.hpp"
#include "memsim/errors.hpp"
#include "memsim/format.hpp"
#include "memsim/kernels.hpp"
#include "memsim/preparation.hpp"

namespace memsim {

namespace {

std::complex<double> unit_phase(std::complex<double> z) {
  const double mag = std::abs(z);
  return mag > 0.0 ? z / mag : std::complex<double>{1.0, 0.0};
}

}  // namespace

void MemoryParams::validate() const {
  if (!(od > 0.0 && t2 > 0.0 && t2eff > 0.0 && t2star > 0.0 && delta > 0.0 &&
        bandwidth > 0.0 && eta_t > 0.0))
    throw ConfigError("memory params: all values must be strictly positive");
  if (t2eff > t2) throw ConfigError("memory params: T2eff cannot exceed T2");
  if (eta_t > 1.0) throw ConfigError("memory params: eta_T cannot exceed 1");
}

std::complex<double> dephasing_factor(const AbsorptionProfile& profile,
                                      double band_lo_hz, double band_hi_hz,
                                      double t) {
  profile.validate();
  const auto& grid = profile.grid;
  grid.require_span(band_lo_hz, band_hi_hz);
  std::size_t first = grid.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = grid.at(i);
    if (d >= band_lo_hz && d <= band_hi_hz) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first > last) throw DegenerateProfileError("dephasing_factor: empty band");

  const auto detunings = grid.detunings();
  const std::span<const double> det(detunings.data() + first, last - first + 1);
  const std::span<const double> w(profile.od.data() + first, last - first + 1);
  double weight = 0.0;
  for (double x : w) weight += x;
  if (!(weight > 0.0))
    throw DegenerateProfileError("dephasing_factor: no absorption in band");
  return kernels::omp::dephasing_sum(det, w, t) / weight;
}

double afc_efficiency_square_comb(double tooth_od, double finesse,
                                  double background_od) {
  const double d = tooth_od / finesse;
  const double x = std::numbers::pi / finesse;
  const double sinc = std::sin(x) / x;
  return d * d * std::exp(-d) * sinc * sinc * std::exp(-background_od);
}

EchoResult afc_echo(const AbsorptionProfile& profile, const MemoryParams& params,
                    const Pulse& input) {
  params.validate();
  const double lo = -0.5 * params.bandwidth;
  const double hi = 0.5 * params.bandwidth;
  const CombMetrics comb = comb_metrics(profile, lo, hi);
  if (std::abs(comb.delta - params.delta) > 2.0 * profile.grid.step())
    throw DegenerateProfileError("afc_echo: comb period " + std::to_string(comb.delta) +
                                 " Hz does not match the configured period");

  // Comb structure above the background floor.
  AbsorptionProfile teeth = profile;
  for (double& x : teeth.od) x = std::max(0.0, x - comb.background_od);
  double sum = 0.0;
  std::size_t bins = 0;
  for (std::size_t i = 0; i < teeth.od.size(); ++i) {
    const double d = teeth.grid.at(i);
    if (d >= lo && d <= hi) {
      sum += teeth.od[i];
      ++bins;
    }
  }
  const double comb_od = sum / static_cast<double>(bins);

  EchoResult echo;
  echo.time = 1.0 / params.delta;
  const auto rephase = dephasing_factor(teeth, lo, hi, echo.time);
  echo.efficiency = comb_od * comb_od * std::exp(-comb_od) * std::norm(rephase) *
                    std::exp(-comb.background_od) *
                    std::exp(-2.0 * echo.time / params.t2);
  echo.amplitude = std::sqrt(echo.efficiency) * unit_phase(rephase) *
                   std::polar(1.0, input.phase);
  echo.wavevector = input.direction;
  return echo;
}

double spin_wave_efficiency(double afc_efficiency, double eta_control_1,
                            double eta_control_2, double tau_s, double t2star) {
  if (!(t2star > 0.0)) throw DomainError("spin_wave_efficiency: T2* must be positive");
  const double x = tau_s / t2star;
  return afc_efficiency * eta_control_1 * eta_control_2 * std::exp(-x * x);
}

EchoResult spin_wave_echo(const AbsorptionProfile& profile,
                          const MemoryParams& params,
                          const std::pair<Pulse, Pulse>& controls, double tau_s,
                          const Pulse& input, std::size_t samples) {
  params.validate();
  const auto& [c1, c2] = controls;
  if (tau_s < c1.width || tau_s < c2.width)
    throw ConfigError("spin_wave_echo: control spacing shorter than the controls");

  EchoResult echo = afc_echo(profile, params, input);
  const double lo = -0.5 * params.bandwidth;
  const double hi = 0.5 * params.bandwidth;
  const auto t1 = transfer_efficiency(c1, lo, hi, samples);
  const auto t2 = transfer_efficiency(c2, lo, hi, samples);
  for (const auto* c : {&c1, &c2})
    if (c->chirp_bandwidth < params.bandwidth)
      echo.warnings.push_back("control '" + c->name +
                              "' chirp narrower than the comb: partial transfer");

  echo.time = tau_s + 1.0 / params.delta;
  echo.efficiency =
      spin_wave_efficiency(echo.efficiency, t1.value, t2.value, tau_s, params.t2star);
  echo.amplitude = std::sqrt(echo.efficiency) * unit_phase(echo.amplitude) *
                   std::polar(1.0, c2.phase - c1.phase);
  return echo;
}

double rose_efficiency(double eta_t, double od, double tau, double t2eff) {
  if (!(eta_t >= 0.0 && eta_t <= 1.0))
    throw DomainError("rose_efficiency: eta_T must lie in [0, 1]");
  if (!(od >= 0.0)) throw DomainError("rose_efficiency: OD must be >= 0");
  if (!(tau >= 0.0)) throw DomainError("rose_efficiency: tau must be >= 0");
  if (!(t2eff > 0.0)) throw DomainError("rose_efficiency: T2eff must be positive");
  return eta_t * eta_t * od * od * std::exp(-od) * std::exp(-4.0 * tau / t2eff);
}

RoseResult rose_echo(const MemoryParams& params, double tau,
                     const std::pair<Pulse, Pulse>& rephasing,
                     int input_direction) {
  params.validate();
  if (input_direction != 1 && input_direction != -1)
    throw ConfigError("rose_echo: input direction must be +1 or -1");
  const auto& [p1, p2] = rephasing;
  if (!(tau > p1.width && tau > p2.width))
    throw ConfigError("rose_echo: tau must exceed the rephasing pulse durations");
  if (std::abs((p2.t0 - p1.t0) - tau) > 1e-9 * tau)
    throw ConfigError("rose_echo: rephasing pulses are not spaced by tau");
  if (!(p1.t0 > 0.0)) throw ConfigError("rose_echo: first rephasing pulse must follow the input");

  RoseResult r;
  const int first_dir[] = {p1.direction};
  const int both_dirs[] = {p1.direction, p2.direction};
  const auto m1 = phase_matching(input_direction, first_dir);
  const auto m2 = phase_matching(input_direction, both_dirs);

  const double absorption = params.od * params.od * std::exp(-params.od);
  r.primary.time = 2.0 * p1.t0;
  r.primary.efficiency =
      params.eta_t * absorption * std::exp(-4.0 * p1.t0 / params.t2eff);
  r.primary.amplitude = std::sqrt(r.primary.efficiency) * std::polar(1.0, 2.0 * p1.phase);
  r.primary.wavevector = m1.wavevector;
  r.primary.silenced = !m1.emitted;

  r.secondary.time = 2.0 * tau;
  r.secondary.efficiency = rose_efficiency(params.eta_t, params.od, tau, params.t2eff);
  r.secondary.amplitude = std::sqrt(r.secondary.efficiency) *
                          std::polar(1.0, 2.0 * (p2.phase - p1.phase));
  r.secondary.wavevector = m2.wavevector;
  r.secondary.silenced = !m2.emitted;

  if (m1.emitted) {
    r.inversion_noise_warning = true;
    r.primary.warnings.push_back(
        "primary echo phase matched: population-inversion noise on the input mode");
  }
  return r;
}

EchoResult two_pulse_echo(const MemoryParams& params, double tau1) {
  if (!(params.t2 > 0.0)) throw ConfigError("two_pulse_echo: T2 must be positive");
  if (!(tau1 >= 0.0)) throw DomainError("two_pulse_echo: tau1 must be >= 0");
  EchoResult echo;
  echo.time = 2.0 * tau1;
  const double a = std::exp(-2.0 * tau1 / params.t2);
  echo.amplitude = {a, 0.0};
  echo.efficiency = a * a;
  return echo;
}

PhaseMatch phase_matching(int input_direction, std::span<const int> pulse_directions) {
  if (pulse_directions.empty())
    throw ConfigError("phase_matching: need at least one rephasing pulse");
  int k = input_direction;
  for (int kp : pulse_directions) k = 2 * kp - k;
  return {k, std::abs(k) == 1};
}

double interfere(const EchoResult& echo, std::complex<double> reference_amplitude,
                 double delta_phi) {
  if (echo.silenced) throw SilencedEchoError("interfere: echo is silenced");
  return std::norm(echo.amplitude + reference_amplitude * std::polar(1.0, delta_phi));
}

double visibility_from_ratio(double r) {
  if (!(r >= 0.0)) throw DomainError("visibility_from_ratio: ratio must be >= 0");
  return 2.0 * r / (1.0 + r * r);
}

double ratio_from_visibility(double v) {
  if (!(v >= 0.0 && v <= 1.0))
    throw DomainError("ratio_from_visibility: visibility must lie in [0, 1]");
  if (v == 0.0) return 0.0;
  return (1.0 - std::sqrt(1.0 - v * v)) / v;
}

void write_echo_csv(std::ostream& out, std::span<const EchoResult> echoes) {
  out << "t_us,re_amplitude,im_amplitude,intensity\n";
  for (const auto& e : echoes)
    out << format_double(e.time * 1e6) << ',' << format_double(e.amplitude.real())
        << ',' << format_double(e.amplitude.imag()) << ','
        << format_double(e.emitted_intensity()) << '\n';
}

}  // namespace memsim
