#include "memsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "memsim/errors.hpp"
#include "memsim/format.hpp"

namespace memsim {

FrequencyGrid::FrequencyGrid(double start_hz, double step_hz,
                             std::size_t count)
    : start_(start_hz), step_(step_hz), count_(count) {
  if (!std::isfinite(start_hz) || !(step_hz > 0.0) || !std::isfinite(step_hz))
    throw ConfigError("frequency grid: step must be positive and finite");
  if (count < 2) throw ConfigError("frequency grid: need at least 2 bins");
}

FrequencyGrid FrequencyGrid::centered(double half_span_hz, double step_hz) {
  if (!(half_span_hz > 0.0) || !(step_hz > 0.0))
    throw ConfigError("frequency grid: half span and step must be positive");
  const auto half_bins =
      static_cast<std::size_t>(std::llround(half_span_hz / step_hz));
  return FrequencyGrid(-static_cast<double>(half_bins) * step_hz, step_hz,
                       2 * half_bins + 1);
}

void FrequencyGrid::require_span(double lo_hz, double hi_hz) const {
  // Half-bin slack so that a grid built with centered(h, s) covers [-h, h].
  const double slack = 0.5 * step_;
  if (lo_hz < start_ - slack || hi_hz > back() + slack) {
    std::ostringstream msg;
    msg << "frequency grid [" << start_ << ", " << back()
        << "] Hz does not span [" << lo_hz << ", " << hi_hz << "] Hz";
    throw UnderSpannedError(msg.str());
  }
}

std::vector<double> FrequencyGrid::detunings() const {
  std::vector<double> out(count_);
  for (std::size_t i = 0; i < count_; ++i) out[i] = at(i);
  return out;
}

void LevelScheme::validate() const {
  if (f0_offset == fplus_offset || f0_offset == fminus_offset ||
      fplus_offset == fminus_offset)
    throw ConfigError("level scheme: transition offsets must be distinct");
  if (!(fplus_offset > f0_offset && f0_offset > fminus_offset))
    throw ConfigError("level scheme: require f+ > f0 > f-");
}

double LevelScheme::offset(GroundLevel level) const noexcept {
  return offsets()[static_cast<std::size_t>(level)];
}

SpectralState SpectralState::thermal(const FrequencyGrid& grid,
                                     double peak_od,
                                     double background_fraction) {
  if (!(peak_od >= 0.0)) throw DomainError("thermal state: peak_od < 0");
  if (!(background_fraction >= 0.0))
    throw DomainError("thermal state: background fraction < 0");
  SpectralState s{grid,
                  std::vector<Populations>(grid.size(),
                                           {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}),
                  std::vector<double>(grid.size(), background_fraction),
                  peak_od, 0.0};
  return s;
}

double SpectralState::total_population() const {
  double total = reservoir;
  for (std::size_t i = 0; i < populations.size(); ++i) {
    const auto& p = populations[i];
    total += p[0] + p[1] + p[2] + background[i];
  }
  return total;
}

void SpectralState::validate() const {
  if (populations.size() != grid.size() || background.size() != grid.size())
    throw ConfigError("spectral state: population arrays do not match grid");
  for (std::size_t i = 0; i < populations.size(); ++i) {
    const auto& p = populations[i];
    if (p[0] < 0.0 || p[1] < 0.0 || p[2] < 0.0 || background[i] < 0.0)
      throw DomainError("spectral state: negative population at bin " +
                        std::to_string(i));
    if (p[0] + p[1] + p[2] > 1.0 + 1e-9)
      throw DomainError("spectral state: populations exceed 1 at bin " +
                        std::to_string(i));
  }
}

void AbsorptionProfile::validate() const {
  if (od.size() != grid.size())
    throw ConfigError("absorption profile: od array does not match grid");
  for (double v : od)
    if (!std::isfinite(v) || v < 0.0)
      throw DomainError("absorption profile: od must be finite and >= 0");
}

double AbsorptionProfile::integral() const {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < od.size(); ++i) sum += od[i] + od[i + 1];
  return 0.5 * grid.step() * sum;
}

double AbsorptionProfile::at_detuning(double hz) const {
  if (!grid.contains(hz)) return 0.0;
  const auto i =
      static_cast<std::size_t>(std::llround((hz - grid.start()) / grid.step()));
  return od[std::min(i, od.size() - 1)];
}

AbsorptionProfile build_gaussian_profile(double gamma_inh_fwhm_hz,
                                         double peak_od,
                                         const FrequencyGrid& grid) {
  if (!(gamma_inh_fwhm_hz > 0.0))
    throw DomainError("gaussian profile: FWHM must be positive");
  if (!(peak_od >= 0.0))
    throw DomainError("gaussian profile: peak_od must be >= 0");
  if (grid.span() < 2.0 * gamma_inh_fwhm_hz)
    throw UnderSpannedError("gaussian profile: grid narrower than 2 FWHM");

  const double k = 4.0 * std::numbers::ln2 / (gamma_inh_fwhm_hz * gamma_inh_fwhm_hz);
  AbsorptionProfile profile{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = grid.at(i);
    profile.od[i] = peak_od * std::exp(-k * d * d);
  }
  return profile;
}

AbsorptionProfile absorption_profile(const SpectralState& state,
                                     GroundLevel level) {
  const auto l = static_cast<std::size_t>(level);
  AbsorptionProfile profile{state.grid, std::vector<double>(state.grid.size())};
  for (std::size_t i = 0; i < profile.od.size(); ++i)
    profile.od[i] =
        state.peak_od * (state.populations[i][l] + state.background[i]);
  return profile;
}

double od_from_transmission(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw DomainError("od_from_transmission: ratio must lie in (0, 1]");
  return -std::log(ratio);
}

double transmission(double od) {
  if (!(od >= 0.0)) throw DomainError("transmission: od must be >= 0");
  return std::exp(-od);
}

double insertion_loss_db(double total_coupling,
                         double other_optics_transmission) {
  if (!(total_coupling > 0.0) || !(other_optics_transmission <= 1.0))
    throw DomainError("insertion loss: fractions must lie in (0, 1]");
  if (total_coupling > other_optics_transmission)
    throw InconsistentInputsError(
        "insertion loss: coupling exceeds the transmission of the other "
        "optics");
  return -10.0 * std::log10(total_coupling / other_optics_transmission);
}

void write_profile_csv(std::ostream& out, const AbsorptionProfile& profile) {
  out << "detuning_hz,od\n";
  for (std::size_t i = 0; i < profile.od.size(); ++i)
    out << format_double(profile.grid.at(i)) << ','
        << format_double(profile.od[i]) << '\n';
}

AbsorptionProfile read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "detuning_hz,od")
    throw ConfigError("profile csv: expected header 'detuning_hz,od'");
  std::vector<double> det, od;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("profile csv: malformed row '" + line + "'");
    det.push_back(std::stod(line.substr(0, comma)));
    od.push_back(std::stod(line.substr(comma + 1)));
  }
  if (det.size() < 2) throw ConfigError("profile csv: need at least 2 rows");
  const double step = (det.back() - det.front()) / static_cast<double>(det.size() - 1);
  AbsorptionProfile p{FrequencyGrid(det.front(), step, det.size()), std::move(od)};
  p.validate();
  return p;
}

}  // namespace memsim
