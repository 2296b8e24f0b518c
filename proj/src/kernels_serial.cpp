#include <cmath>
#include <numbers>

#include "memsim/kernels.hpp"

namespace memsim::kernels::serial {

std::complex<double> dephasing_sum(std::span<const double> detuning,
                                   std::span<const double> weight, double t) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < detuning.size(); ++i) {
    const double phase = 2.0 * std::numbers::pi * detuning[i] * t;
    re += weight[i] * std::cos(phase);
    im -= weight[i] * std::sin(phase);
  }
  return {re, im};
}

void burn_step(std::span<Populations> populations,
               std::span<const PumpRates> rates, const Branching& branching) {
  for (std::size_t i = 0; i < populations.size(); ++i)
    burn_bin(populations[i], rates[i], branching);
}

std::vector<BlochVector> propagate(const Pulse& pulse,
                                   std::span<const double> detunings,
                                   const BlochVector& initial) {
  std::vector<BlochVector> out(detunings.size());
  for (std::size_t i = 0; i < detunings.size(); ++i)
    out[i] = bloch_integrate(pulse, detunings[i], initial);
  return out;
}

}  // namespace memsim::kernels::serial
