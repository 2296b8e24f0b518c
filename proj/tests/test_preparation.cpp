#include "doctest.h"

#include <cmath>

#include "memsim/errors.hpp"
#include "memsim/preparation.hpp"
#include "oracles.hpp"

using namespace memsim;
using doctest::Approx;

namespace {

const LevelScheme kScheme = LevelScheme::europium151();

FrequencyGrid window_grid() { return FrequencyGrid::centered(4e6, 2e3); }

SpectralState cleaned(int reps = 100) {
  auto sweeps = default_class_clean_sweeps(kScheme);
  for (auto& s : sweeps) s.repetitions = reps;
  return class_clean(SpectralState::thermal(window_grid(), 1.75), kScheme, sweeps);
}

SpectralState polarized() {
  return spin_polarize(cleaned(), kScheme, default_spin_polarize_sweeps(kScheme));
}

double max_bin_change(const SpectralState& a, const SpectralState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.populations.size(); ++i) {
    for (int k = 0; k < 3; ++k)
      m = std::max(m, std::abs(a.populations[i][k] - b.populations[i][k]));
    m = std::max(m, std::abs(a.background[i] - b.background[i]));
  }
  return m;
}

CombSpec default_comb() { return CombSpec{}; }

// Square comb of teeth `od` on background `d0`, teeth at (m + 1/2) delta.
AbsorptionProfile synthetic_comb(double delta, double finesse, double od, double d0,
                                 double half_band, const FrequencyGrid& grid) {
  CombSpec spec;
  spec.delta = delta;
  spec.finesse = finesse;
  AbsorptionProfile p{grid, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = grid.at(i);
    p.od[i] = std::abs(d) <= half_band && spec.in_tooth(d) ? od + d0 : d0;
  }
  return p;
}

}  // namespace

TEST_CASE("class cleaning raises centre transmission monotonically") {
  double previous = -1.0;
  for (int reps = 0; reps <= 100; reps += 10) {
    const auto p = absorption_profile(cleaned(reps));
    const double t = transmission(p.at_detuning(0.0));
    CHECK(t >= previous);
    previous = t;
  }
  CHECK(previous > transmission(1.75) * 1.5);
}

TEST_CASE("class cleaning is a fixed point once converged") {
  const auto once = cleaned();
  const auto twice = class_clean(once, kScheme, default_class_clean_sweeps(kScheme));
  CHECK(max_bin_change(once, twice) <= 1e-6);
}

TEST_CASE("zero pump strength leaves the state unchanged") {
  auto sweeps = default_class_clean_sweeps(kScheme);
  for (auto& s : sweeps) s.pump_strength = 0.0;
  const auto start = SpectralState::thermal(window_grid(), 1.75);
  const auto out = class_clean(start, kScheme, sweeps);
  CHECK(out.populations == start.populations);
  CHECK(out.background == start.background);
  CHECK(out.reservoir == 0.0);
}

TEST_CASE("sweeps reaching past the grid edge are rejected") {
  auto sweeps = default_class_clean_sweeps(kScheme);
  sweeps[0].span = 10e6;
  CHECK_THROWS_AS(class_clean(SpectralState::thermal(window_grid(), 1.75), kScheme, sweeps),
                  ConfigError);
  auto missing = default_class_clean_sweeps(kScheme);
  missing[1].center_offset = 1e6;
  CHECK_THROWS_AS(class_clean(SpectralState::thermal(window_grid(), 1.75), kScheme, missing),
                  ConfigError);
}

TEST_CASE("spin polarisation accumulates population in g1") {
  const auto s = polarized();
  const auto& g = s.grid;
  int checked = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g.at(i)) > 2e6) continue;
    const auto& p = s.populations[i];
    CHECK(p[0] >= 0.99 * (p[0] + p[1] + p[2]));
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("spin polarisation with zero repetitions returns the input") {
  auto sweeps = default_spin_polarize_sweeps(kScheme);
  for (auto& s : sweeps) s.repetitions = 0;
  const auto in = cleaned();
  const auto out = spin_polarize(in, kScheme, sweeps);
  CHECK(out.populations == in.populations);
  CHECK(out.background == in.background);
}

TEST_CASE("single full-strength repetition follows the rate map") {
  auto sweeps = default_spin_polarize_sweeps(kScheme);
  for (auto& s : sweeps) {
    s.repetitions = 1;
    s.pump_strength = 1.0;
  }
  const auto in = SpectralState::thermal(window_grid(), 1.75);
  const auto out = spin_polarize(in, kScheme, sweeps);
  const auto expected = oracle::rate_map({1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.0, 1.0, 1.0},
                                         {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto centre = out.populations[out.grid.size() / 2];
  CHECK(centre[0] - 1.0 / 3 == Approx(2.0 / 9).epsilon(1e-12));
  for (int k = 0; k < 3; ++k) CHECK(centre[k] == Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("comb creation: 16 teeth spaced 125 kHz") {
  const auto grid = FrequencyGrid::centered(4e6, 1e3);
  auto sweeps = default_class_clean_sweeps(kScheme);
  auto state = class_clean(SpectralState::thermal(grid, 1.75), kScheme, sweeps);
  state = spin_polarize(state, kScheme, default_spin_polarize_sweeps(kScheme));
  const auto comb = create_afc(state, default_comb(), kScheme);
  const auto m = comb_metrics(absorption_profile(comb), -1e6, 1e6);
  CHECK(m.teeth == 16);
  CHECK(std::abs(m.delta - 125e3) <= grid.step());
}

TEST_CASE("comb creation: finesse near one leaves a near-flat profile") {
  CombSpec spec;
  spec.finesse = 1.0 + 1e-9;
  const auto state = polarized();
  const auto out = absorption_profile(create_afc(state, spec, kScheme));
  const auto in = absorption_profile(state);
  double contrast = 0.0;
  for (std::size_t i = 0; i < in.od.size(); ++i)
    contrast = std::max(contrast, std::abs(out.od[i] - in.od[i]) / in.od[i]);
  CHECK(contrast < 0.05);
}

TEST_CASE("comb creation: zero cycles and resolution limit") {
  CombSpec spec;
  spec.cycles = 0;
  const auto state = polarized();
  CHECK(create_afc(state, spec, kScheme).populations == state.populations);
  spec.cycles = 50;
  spec.delta = 6e3;  // 3 bins of 2 kHz
  spec.bandwidth = 1e6;
  CHECK_THROWS_AS(create_afc(state, spec, kScheme), ResolutionError);
}

TEST_CASE("property: tooth fraction matches dense sampling") {
  oracle::Gen gen(61);
  for (int trial = 0; trial < 200; ++trial) {
    CombSpec spec;
    spec.delta = gen.uniform(50e3, 200e3);
    spec.finesse = gen.uniform(1.1, 10.0);
    const double lo = gen.uniform(-1e6, 1e6);
    const double hi = lo + gen.log_uniform(10.0, 5e5);
    const int n = 20000;
    int inside = 0;
    for (int k = 0; k < n; ++k) inside += spec.in_tooth(lo + (hi - lo) * (k + 0.5) / n);
    CHECK(spec.tooth_fraction(lo, hi) == Approx(double(inside) / n).epsilon(2e-3).scale(1.0));
  }
  CombSpec spec;
  CHECK(spec.tooth_fraction(0.0, spec.delta) == Approx(1.0 / spec.finesse).epsilon(1e-12));
  CHECK(spec.tooth_fraction(-1e3, 1e3) == 0.0);
  CHECK(spec.tooth_fraction(62.5e3 - 1e3, 62.5e3 + 1e3) == 1.0);
}

TEST_CASE("comb metrics on an analytic comb") {
  const auto grid = FrequencyGrid::centered(1.5e6, 1e3);
  const auto p = synthetic_comb(125e3, 4.0, 1.0, 0.1, 1e6, grid);
  const auto m = comb_metrics(p, -1e6, 1e6);
  CHECK(std::abs(m.delta - 125e3) <= grid.step());
  CHECK(m.finesse == Approx(4.0).epsilon(0.05));
  CHECK(m.background_od == Approx(0.1));
  CHECK(m.peak_od == Approx(1.1));
}

TEST_CASE("comb metrics needs at least three teeth") {
  const auto grid = FrequencyGrid::centered(1.5e6, 1e3);
  AbsorptionProfile flat{grid, std::vector<double>(grid.size(), 0.7)};
  CHECK_THROWS_AS(comb_metrics(flat, -1e6, 1e6), InsufficientStructureError);
  const auto two = synthetic_comb(125e3, 4.0, 1.0, 0.0, 125e3, grid);
  CHECK_THROWS_AS(comb_metrics(two, -1e6, 1e6), InsufficientStructureError);
}

TEST_CASE("property: total population is conserved by every preparation step") {
  oracle::Gen gen(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto grid = FrequencyGrid::centered(4e6, gen.uniform(2e3, 8e3));
    SpectralState s = SpectralState::thermal(grid, gen.uniform(0.5, 3.0));
    const double before = s.total_population();
    Branching b{gen.uniform(0.1, 1.0), gen.uniform(0.1, 1.0), gen.uniform(0.1, 1.0)};
    const double sum = b[0] + b[1] + b[2];
    for (auto& x : b) x /= sum;
    b[2] = 1.0 - b[0] - b[1];

    auto clean = default_class_clean_sweeps(kScheme);
    for (auto& sw : clean) {
      sw.repetitions = gen.integer(0, 150);
      sw.pump_strength = gen.uniform(0.0, 1.0);
    }
    s = class_clean(s, kScheme, clean, b);
    CHECK(std::abs(s.total_population() - before) <= 1e-9 * before);
    auto pol = default_spin_polarize_sweeps(kScheme);
    for (auto& sw : pol) {
      sw.repetitions = gen.integer(0, 150);
      sw.pump_strength = gen.uniform(0.0, 1.0);
    }
    s = spin_polarize(s, kScheme, pol, b);
    CHECK(std::abs(s.total_population() - before) <= 1e-9 * before);
    CombSpec spec;
    spec.delta = 125e3;
    spec.finesse = gen.uniform(1.5, 8.0);
    spec.cycles = gen.integer(0, 80);
    spec.pump_strength = gen.uniform(0.0, 1.0);
    s = create_afc(s, spec, kScheme, b);
    CHECK(std::abs(s.total_population() - before) <= 1e-9 * before);
    for (const auto& p : s.populations)
      for (double x : p) {
        CAPTURE(x);
        CHECK((x >= -1e-12 && x <= 1.0 + 1e-12));
      }
  }
}

TEST_CASE("property: spin polarisation is idempotent at convergence") {
  const auto once = polarized();
  const auto twice = spin_polarize(once, kScheme, default_spin_polarize_sweeps(kScheme));
  CHECK(max_bin_change(once, twice) <= 1e-6);
}

TEST_CASE("property: prepared comb is periodic over interior teeth") {
  const auto grid = FrequencyGrid::centered(4e6, 1e3);
  auto state = class_clean(SpectralState::thermal(grid, 1.75), kScheme,
                           default_class_clean_sweeps(kScheme));
  state = spin_polarize(state, kScheme, default_spin_polarize_sweeps(kScheme));
  CombSpec spec;
  spec.pump_strength = 0.07;
  const auto p = absorption_profile(create_afc(state, spec, kScheme));
  const auto shift = static_cast<std::size_t>(std::llround(spec.delta / grid.step()));
  double sq = 0.0, ref = 0.0;
  for (std::size_t i = 0; i + shift < grid.size(); ++i) {
    if (grid.at(i) < -0.875e6 || grid.at(i + shift) > 0.875e6) continue;
    sq += std::pow(p.od[i] - p.od[i + shift], 2);
    ref += p.od[i] * p.od[i];
  }
  CHECK(std::sqrt(sq / ref) < 0.01);
}

TEST_CASE("property: anti-tooth transmission never drops with more cycles") {
  const auto state = polarized();
  CombSpec spec;
  spec.pump_strength = 0.1;
  double previous = 0.0;
  for (int cycles = 0; cycles <= 60; cycles += 5) {
    spec.cycles = cycles;
    const auto p = absorption_profile(create_afc(state, spec, kScheme));
    const double t = transmission(p.at_detuning(0.0));  // 0 is an anti-tooth centre
    CHECK(t >= previous);
    previous = t;
  }
}
