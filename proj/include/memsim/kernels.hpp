#pragma once

// Data-parallel inner loops. Each kernel exists twice with the same
// signature: a plain serial loop kept as the reference, and an OpenMP
// version used by the library. Reductions in the OpenMP versions fill a
// per-element buffer in parallel and sum it in index order afterwards, so
// both variants return bit-identical results for any thread count.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "memsim/bloch.hpp"
#include "memsim/spectral.hpp"

namespace memsim::kernels {

// Per-level excitation probability of one burn repetition, by bin.
using PumpRates = std::array<double, 3>;
using Branching = std::array<double, 3>;

namespace serial {

// Sum over bins of weight * exp(-i 2 pi detuning t).
std::complex<double> dephasing_sum(std::span<const double> detuning,
                                   std::span<const double> weight, double t);

// One memoryless burn repetition: each level loses its pumped fraction to
// the excited state, which decays back according to `branching`.
void burn_step(std::span<Populations> populations,
               std::span<const PumpRates> rates, const Branching& branching);

// Final Bloch vector of `pulse` for each detuning, from `initial`.
std::vector<BlochVector> propagate(const Pulse& pulse,
                                   std::span<const double> detunings,
                                   const BlochVector& initial);

}  // namespace serial

namespace omp {

std::complex<double> dephasing_sum(std::span<const double> detuning,
                                   std::span<const double> weight, double t);

void burn_step(std::span<Populations> populations,
               std::span<const PumpRates> rates, const Branching& branching);

std::vector<BlochVector> propagate(const Pulse& pulse,
                                   std::span<const double> detunings,
                                   const BlochVector& initial);

}  // namespace omp

// Per-bin update shared by both burn_step variants.
inline void burn_bin(Populations& p, const PumpRates& r,
                     const Branching& branching) {
  const double e0 = r[0] * p[0];
  const double e1 = r[1] * p[1];
  const double e2 = r[2] * p[2];
  const double excited = e0 + e1 + e2;
  p[0] = p[0] - e0 + branching[0] * excited;
  p[1] = p[1] - e1 + branching[1] * excited;
  p[2] = p[2] - e2 + branching[2] * excited;
}

}  // namespace memsim::kernels
