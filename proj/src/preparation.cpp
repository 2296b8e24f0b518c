#include "memsim/preparation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "memsim/errors.hpp"
#include "memsim/kernels.hpp"

namespace memsim {

namespace {

void validate_branching(const Branching& b) {
  double sum = 0.0;
  for (double x : b) {
    if (!(x >= 0.0)) throw ConfigError("branching ratios must be >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ConfigError("branching ratios must sum to 1");
}

enum class Coverage { outside, inside };

// Where [lo, hi] sits relative to the grid. A range crossing a grid edge
// would pump into the reservoir region beyond the grid.
Coverage coverage(const FrequencyGrid& grid, double lo, double hi) {
  const double slack = 0.5 * grid.step();
  const double g_lo = grid.start() - slack;
  const double g_hi = grid.back() + slack;
  if (hi < g_lo || lo > g_hi) return Coverage::outside;
  if (lo >= g_lo && hi <= g_hi) return Coverage::inside;
  throw ConfigError("burn sweep range [" + std::to_string(lo) + ", " +
                    std::to_string(hi) +
                    "] Hz overlaps the reservoir region at the grid edge");
}

bool in_range(double x, double center, double half_width, double step) {
  return std::abs(x - center) <= half_width * (1.0 + 1e-12) + 1e-9 * step;
}

bool matches(double value, double target) {
  return std::abs(value - target) <= 1.0 + 1e-9 * std::abs(target);
}

void require_centers(std::span<const BurnSweep> sweeps,
                     std::initializer_list<double> centers,
                     const char* operation) {
  if (sweeps.size() != centers.size())
    throw ConfigError(std::string(operation) + ": expected " +
                      std::to_string(centers.size()) + " sweeps");
  std::vector<bool> used(sweeps.size(), false);
  for (double c : centers) {
    bool found = false;
    for (std::size_t j = 0; j < sweeps.size() && !found; ++j)
      if (!used[j] && matches(sweeps[j].center_offset, c)) used[j] = found = true;
    if (!found)
      throw ConfigError(std::string(operation) + ": no sweep centred at " +
                        std::to_string(c) + " Hz");
  }
}

}  // namespace

void BurnSweep::validate() const {
  if (!(span > 0.0)) throw ConfigError("burn sweep: span must be positive");
  if (!(duration > 0.0)) throw ConfigError("burn sweep: duration must be positive");
  if (repetitions < 0) throw ConfigError("burn sweep: repetitions must be >= 0");
  if (!(pump_strength >= 0.0 && pump_strength <= 1.0))
    throw ConfigError("burn sweep: pump strength must lie in [0, 1]");
}

void CombSpec::validate() const {
  if (!(delta > 0.0)) throw ConfigError("comb: period must be positive");
  if (!(bandwidth >= 2.0 * delta))
    throw ConfigError("comb: bandwidth must be at least two periods");
  if (!(finesse > 1.0)) throw ConfigError("comb: finesse must exceed 1");
  if (cycles < 0) throw ConfigError("comb: cycles must be >= 0");
  if (!(pump_strength >= 0.0 && pump_strength <= 1.0))
    throw ConfigError("comb: pump strength must lie in [0, 1]");
}

bool CombSpec::in_tooth(double detuning_hz) const {
  const double x = detuning_hz / delta - 0.5;
  const double distance = std::abs(x - std::round(x)) * delta;
  return distance <= 0.5 * delta / finesse * (1.0 + 1e-12);
}

double CombSpec::tooth_fraction(double lo_hz, double hi_hz) const {
  if (!(hi_hz > lo_hz)) return in_tooth(lo_hz) ? 1.0 : 0.0;
  const double half = 0.5 * delta / finesse;
  // Tooth measure in (-inf, x], up to a constant.
  const auto covered = [&](double x) {
    const double periods = std::floor(x / delta);
    const double y = x - periods * delta;
    return periods * 2.0 * half + std::clamp(y - (0.5 * delta - half), 0.0, 2.0 * half);
  };
  return std::clamp((covered(hi_hz) - covered(lo_hz)) / (hi_hz - lo_hz), 0.0, 1.0);
}

SpectralState burn(SpectralState state, const LevelScheme& scheme,
                   std::span<const BurnSweep> sweeps,
                   const Branching& branching) {
  scheme.validate();
  validate_branching(branching);
  state.validate();
  const auto& grid = state.grid;
  const std::size_t n = grid.size();
  const auto offsets = scheme.offsets();

  // Bins addressed by each sweep, per level and for the background.
  struct Footprint {
    std::vector<std::array<bool, 3>> level;
    std::vector<bool> background;
  };
  std::vector<Footprint> footprints;
  for (const auto& sweep : sweeps) {
    sweep.validate();
    Footprint fp{std::vector<std::array<bool, 3>>(n, {false, false, false}),
                 std::vector<bool>(n, false)};
    const double half = 0.5 * sweep.span;
    for (std::size_t k = 0; k < 3; ++k) {
      const double center = sweep.center_offset - offsets[k];
      if (coverage(grid, center - half, center + half) == Coverage::outside) continue;
      for (std::size_t i = 0; i < n; ++i)
        fp.level[i][k] = in_range(grid.at(i), center, half, grid.step());
    }
    if (coverage(grid, sweep.center_offset - half, sweep.center_offset + half) ==
        Coverage::inside)
      for (std::size_t i = 0; i < n; ++i)
        fp.background[i] = in_range(grid.at(i), sweep.center_offset, half, grid.step());
    footprints.push_back(std::move(fp));
  }

  // Sweeps with different repetition counts drop out one by one; rates are
  // constant between those points.
  std::set<int> stops;
  for (const auto& sweep : sweeps) stops.insert(sweep.repetitions);
  int done = 0;
  std::vector<kernels::PumpRates> rates(n);
  std::vector<double> background_rate(n);
  for (int stop : stops) {
    if (stop <= done) continue;
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 3> keep{1.0, 1.0, 1.0};
      double keep_bg = 1.0;
      for (std::size_t j = 0; j < sweeps.size(); ++j) {
        if (sweeps[j].repetitions <= done) continue;
        const double s = sweeps[j].pump_strength;
        for (std::size_t k = 0; k < 3; ++k)
          if (footprints[j].level[i][k]) keep[k] *= 1.0 - s;
        if (footprints[j].background[i]) keep_bg *= 1.0 - s;
      }
      rates[i] = {1.0 - keep[0], 1.0 - keep[1], 1.0 - keep[2]};
      background_rate[i] = 1.0 - keep_bg;
    }
    for (int r = done; r < stop; ++r) {
      kernels::omp::burn_step(state.populations, rates, branching);
      for (std::size_t i = 0; i < n; ++i) {
        const double lost = background_rate[i] * state.background[i];
        state.background[i] -= lost;
        state.reservoir += lost;
      }
    }
    done = stop;
  }
  return state;
}

SpectralState class_clean(SpectralState state, const LevelScheme& scheme,
                          std::span<const BurnSweep> sweeps,
                          const Branching& branching) {
  require_centers(sweeps, {scheme.f0_offset, scheme.fplus_offset, scheme.fminus_offset},
                  "class_clean");
  return burn(std::move(state), scheme, sweeps, branching);
}

SpectralState spin_polarize(SpectralState state, const LevelScheme& scheme,
                            std::span<const BurnSweep> sweeps,
                            const Branching& branching) {
  require_centers(sweeps, {scheme.fplus_offset, scheme.fminus_offset}, "spin_polarize");
  return burn(std::move(state), scheme, sweeps, branching);
}

SpectralState create_afc(SpectralState state, const CombSpec& spec,
                         const LevelScheme& scheme, const Branching& branching) {
  spec.validate();
  scheme.validate();
  validate_branching(branching);
  state.validate();
  const auto& grid = state.grid;
  if (spec.delta < 4.0 * grid.step())
    throw ResolutionError("create_afc: comb period shorter than 4 grid bins");
  grid.require_span(-0.5 * spec.bandwidth, 0.5 * spec.bandwidth);

  std::vector<kernels::PumpRates> rates(grid.size(), {0.0, 0.0, 0.0});
  const double half_band = 0.5 * spec.bandwidth;
  const double half_bin = 0.5 * grid.step();
  // Bins straddling a tooth edge are pumped in proportion to their
  // anti-tooth share.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = grid.at(i);
    if (std::abs(d) > half_band) continue;
    const double exposed = 1.0 - spec.tooth_fraction(d - half_bin, d + half_bin);
    rates[i] = {spec.pump_strength * exposed, 0.0, spec.pump_strength * exposed};
  }
  for (int c = 0; c < spec.cycles; ++c)
    kernels::omp::burn_step(state.populations, rates, branching);
  return state;
}

CombMetrics comb_metrics(const AbsorptionProfile& profile, double band_lo_hz,
                         double band_hi_hz) {
  profile.validate();
  const auto& grid = profile.grid;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.at(i) >= band_lo_hz && grid.at(i) <= band_hi_hz) idx.push_back(i);
  if (idx.size() < 3)
    throw InsufficientStructureError("comb_metrics: band holds fewer than 3 bins");

  const auto& od = profile.od;
  double lo = od[idx.front()];
  double hi = lo;
  for (auto i : idx) {
    lo = std::min(lo, od[i]);
    hi = std::max(hi, od[i]);
  }
  if (hi - lo <= 1e-9 * std::max(1.0, hi))
    throw InsufficientStructureError("comb_metrics: flat profile");
  const double level = 0.5 * (hi + lo);

  struct Tooth {
    double left, right, peak;
  };
  std::vector<Tooth> teeth;
  const std::size_t first = idx.front();
  const std::size_t last = idx.back();
  std::size_t i = first;
  while (i <= last) {
    if (od[i] <= level) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double peak = od[i];
    while (j + 1 <= last && od[j + 1] > level) peak = std::max(peak, od[++j]);
    // Runs touching the band edge are incomplete teeth.
    if (i > first && j < last) {
      const double left = static_cast<double>(i - 1) +
                          (level - od[i - 1]) / (od[i] - od[i - 1]);
      const double right = static_cast<double>(j) +
                           (od[j] - level) / (od[j] - od[j + 1]);
      teeth.push_back({left, right, peak});
    }
    i = j + 1;
  }
  if (teeth.size() < 3)
    throw InsufficientStructureError("comb_metrics: fewer than 3 teeth in band");

  CombMetrics m;
  m.teeth = static_cast<int>(teeth.size());
  const double step = grid.step();
  double width_sum = 0.0, peak_sum = 0.0, bg_sum = 0.0;
  for (std::size_t t = 0; t < teeth.size(); ++t) {
    width_sum += (teeth[t].right - teeth[t].left) * step;
    peak_sum += teeth[t].peak;
    if (t + 1 < teeth.size()) {
      const double mid = 0.25 * (teeth[t].left + teeth[t].right + teeth[t + 1].left +
                                 teeth[t + 1].right);
      bg_sum += od[static_cast<std::size_t>(std::llround(mid))];
    }
  }
  const auto count = static_cast<double>(teeth.size());
  const double first_center = 0.5 * (teeth.front().left + teeth.front().right);
  const double last_center = 0.5 * (teeth.back().left + teeth.back().right);
  m.delta = (last_center - first_center) * step / (count - 1.0);
  m.finesse = m.delta / (width_sum / count);
  m.peak_od = peak_sum / count;
  m.background_od = bg_sum / (count - 1.0);
  return m;
}

std::array<BurnSweep, 3> default_class_clean_sweeps(const LevelScheme& scheme) {
  return {BurnSweep{scheme.f0_offset}, BurnSweep{scheme.fplus_offset},
          BurnSweep{scheme.fminus_offset}};
}

std::array<BurnSweep, 2> default_spin_polarize_sweeps(const LevelScheme& scheme) {
  return {BurnSweep{scheme.fplus_offset}, BurnSweep{scheme.fminus_offset}};
}

}  // namespace memsim
