#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace memsim {

// Uniform detuning axis in Hz relative to the f0 transition.
class FrequencyGrid {
 public:
  FrequencyGrid(double start_hz, double step_hz, std::size_t count);

  // Grid spanning [-half_span, +half_span] with the given step.
  static FrequencyGrid centered(double half_span_hz, double step_hz);

  double start() const noexcept { return start_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return count_; }
  double back() const noexcept { return at(count_ - 1); }
  double span() const noexcept { return back() - start_; }
  double at(std::size_t i) const noexcept {
    return start_ + static_cast<double>(i) * step_;
  }
  bool contains(double hz) const noexcept {
    return hz >= start_ && hz <= back();
  }

  // Throws UnderSpannedError unless [lo, hi] lies inside the grid.
  void require_span(double lo_hz, double hi_hz) const;

  std::vector<double> detunings() const;

  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

 private:
  double start_;
  double step_;
  std::size_t count_;
};

enum class GroundLevel : std::size_t { g1 = 0, g2 = 1, g3 = 2 };

// Three ground hyperfine levels coupled to one excited level. Offsets are
// the optical transition frequencies of each ground level relative to
// g1 -> e (the f0 transition).
struct LevelScheme {
  std::array<std::string, 3> ground_labels{"|+-1/2>g", "|+-3/2>g",
                                           "|+-5/2>g"};
  std::string excited_label{"|+-5/2>e"};
  double f0_offset{0.0};
  double fplus_offset{34.5e6};
  double fminus_offset{-20.9e6};

  void validate() const;
  double offset(GroundLevel level) const noexcept;
  std::array<double, 3> offsets() const noexcept {
    return {f0_offset, fplus_offset, fminus_offset};
  }

  static LevelScheme europium151() { return {}; }
};

using Populations = std::array<double, 3>;

// Per-bin ground populations of the tracked ion class plus the absorption
// left by the other (untracked) classes. Bin i holds ions whose f0
// transition sits at grid.at(i). Population pumped out of the window is
// accounted for in `reservoir`.
struct SpectralState {
  FrequencyGrid grid;
  std::vector<Populations> populations;
  std::vector<double> background;
  double peak_od{0.0};
  double reservoir{0.0};

  // Unprepared ensemble: equal thermal populations in the three ground
  // levels and other classes contributing `background_fraction` of the
  // fully polarized absorption.
  static SpectralState thermal(const FrequencyGrid& grid, double peak_od,
                               double background_fraction = 2.0 / 3.0);

  double total_population() const;
  void validate() const;
};

struct AbsorptionProfile {
  FrequencyGrid grid;
  std::vector<double> od;

  void validate() const;
  // Trapezoid integral of od over the grid, in Hz.
  double integral() const;
  double at_detuning(double hz) const;
};

AbsorptionProfile build_gaussian_profile(double gamma_inh_fwhm_hz,
                                         double peak_od,
                                         const FrequencyGrid& grid);

// Absorption seen by a probe on the transition from `level`.
AbsorptionProfile absorption_profile(const SpectralState& state,
                                     GroundLevel level = GroundLevel::g1);

double od_from_transmission(double ratio);
double transmission(double od);
double insertion_loss_db(double total_coupling,
                         double other_optics_transmission);

void write_profile_csv(std::ostream& out, const AbsorptionProfile& profile);
AbsorptionProfile read_profile_csv(std::istream& in);

}  // namespace memsim
