#include <cmath>
#include <exception>
#include <numbers>

#include "memsim/kernels.hpp"

namespace memsim::kernels::omp {

std::complex<double> dephasing_sum(std::span<const double> detuning,
                                   std::span<const double> weight, double t) {
  const auto n = static_cast<std::ptrdiff_t>(detuning.size());
  std::vector<double> re_terms(detuning.size());
  std::vector<double> im_terms(detuning.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double phase = 2.0 * std::numbers::pi * detuning[i] * t;
    re_terms[i] = weight[i] * std::cos(phase);
    im_terms[i] = weight[i] * std::sin(phase);
  }
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < re_terms.size(); ++i) {
    re += re_terms[i];
    im -= im_terms[i];
  }
  return {re, im};
}

void burn_step(std::span<Populations> populations,
               std::span<const PumpRates> rates, const Branching& branching) {
  const auto n = static_cast<std::ptrdiff_t>(populations.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    burn_bin(populations[i], rates[i], branching);
}

std::vector<BlochVector> propagate(const Pulse& pulse,
                                   std::span<const double> detunings,
                                   const BlochVector& initial) {
  const auto n = static_cast<std::ptrdiff_t>(detunings.size());
  std::vector<BlochVector> out(detunings.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = bloch_integrate(pulse, detunings[i], initial);
    } catch (...) {
#pragma omp critical(memsim_propagate_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace memsim::kernels::omp
