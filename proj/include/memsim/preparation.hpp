#pragma once

#include <array>
#include <span>

#include "memsim/spectral.hpp"

namespace memsim {

// Decay probabilities from the excited state into g1, g2, g3.
using Branching = std::array<double, 3>;
inline constexpr Branching kUniformBranching{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

// A repeated frequency-swept burn. The laser covers
// [center_offset - span/2, center_offset + span/2] with uniform per-pass
// excitation probability `pump_strength`.
struct BurnSweep {
  double center_offset{0.0};
  double span{4e6};
  double duration{2e-3};
  int repetitions{100};
  double pump_strength{0.5};

  void validate() const;
};

// Comb of square teeth, period `delta`, tooth width delta / finesse, teeth
// centred at (m + 1/2) * delta inside [-bandwidth/2, +bandwidth/2].
struct CombSpec {
  double delta{125e3};
  double bandwidth{2e6};
  double finesse{4.0};
  int cycles{50};
  double pump_strength{0.5};

  void validate() const;
  bool in_tooth(double detuning_hz) const;
  // Fraction of [lo_hz, hi_hz] covered by teeth.
  double tooth_fraction(double lo_hz, double hi_hz) const;
};

// Apply the sweeps simultaneously, repetition by repetition. A sweep stops
// after its own repetition count. Each sweep addresses ground level k of
// ions whose f0 transition lies at laser - offset(k); other ion classes
// (`background`) under the laser are pumped into the reservoir.
SpectralState burn(SpectralState state, const LevelScheme& scheme,
                   std::span<const BurnSweep> sweeps,
                   const Branching& branching = kUniformBranching);

// Sweeps at f0, f+ and f- (any order).
SpectralState class_clean(SpectralState state, const LevelScheme& scheme,
                          std::span<const BurnSweep> sweeps,
                          const Branching& branching = kUniformBranching);

// Sweeps at f+ and f- (any order). Expects a class-cleaned state; this is
// not checked.
SpectralState spin_polarize(SpectralState state, const LevelScheme& scheme,
                            std::span<const BurnSweep> sweeps,
                            const Branching& branching = kUniformBranching);

// Parallel comb burning: anti-tooth bins inside the band have g1 and g3
// pumped each cycle, which shelves them in g2.
SpectralState create_afc(SpectralState state, const CombSpec& spec,
                         const LevelScheme& scheme,
                         const Branching& branching = kUniformBranching);

struct CombMetrics {
  double delta{0.0};
  double finesse{0.0};
  double peak_od{0.0};
  double background_od{0.0};
  int teeth{0};
};

// Teeth are runs above the half level between the band's min and max od.
CombMetrics comb_metrics(const AbsorptionProfile& profile, double band_lo_hz,
                         double band_hi_hz);

// Default preparation sweeps for a scheme: three simultaneous sweeps for
// class cleaning and two for spin polarisation.
std::array<BurnSweep, 3> default_class_clean_sweeps(const LevelScheme& scheme);
std::array<BurnSweep, 2> default_spin_polarize_sweeps(const LevelScheme& scheme);

}  // namespace memsim
