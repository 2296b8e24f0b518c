#include "memsim/sequence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>

#include "memsim/errors.hpp"
#include "memsim/format.hpp"

namespace memsim {

namespace {

struct Unit {
  std::string_view suffix;
  double scale;
};

constexpr Unit kTimeUnits[] = {{"ns", 1e-9}, {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}};
constexpr Unit kFrequencyUnits[] = {
    {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
constexpr Unit kAngleUnits[] = {{"deg", std::numbers::pi / 180.0}, {"rad", 1.0}};
constexpr Unit kPowerUnits[] = {{"mW", 1e-3}, {"W", 1.0}};

std::span<const Unit> units_for(Quantity kind) {
  switch (kind) {
    case Quantity::time: return kTimeUnits;
    case Quantity::frequency: return kFrequencyUnits;
    case Quantity::angle: return kAngleUnits;
    case Quantity::power: return kPowerUnits;
  }
  return {};
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// key=value tokens of one line, with duplicate and syntax checks.
std::map<std::string, std::string, std::less<>> key_values(
    std::span<const std::string_view> tokens, std::size_t line) {
  std::map<std::string, std::string, std::less<>> kv;
  for (auto tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw ParseError(line, std::string(tok), "expected key=value");
    std::string key(tok.substr(0, eq));
    if (kv.contains(key)) throw ParseError(line, key, "duplicate key");
    kv.emplace(std::move(key), std::string(tok.substr(eq + 1)));
  }
  return kv;
}

void reject_unknown(const std::map<std::string, std::string, std::less<>>& kv,
                    std::initializer_list<std::string_view> allowed,
                    std::size_t line) {
  for (const auto& [key, value] : kv)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError(line, key, "unknown key");
}

double quantity_field(const std::map<std::string, std::string, std::less<>>& kv,
                      std::string_view key, Quantity kind, std::size_t line) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParseError(line, std::string(key), "missing required field");
  try {
    return parse_quantity(it->second, kind);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, std::string(key), e.what());
  }
}

const std::string& required(const std::map<std::string, std::string, std::less<>>& kv,
                            std::string_view key, std::size_t line) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParseError(line, std::string(key), "missing required field");
  return it->second;
}

bool valid_identifier(std::string_view id) {
  return !id.empty() && id.find('=') == std::string_view::npos;
}

Pulse parse_pulse(std::span<const std::string_view> tokens, std::size_t line,
                  const LevelScheme& levels) {
  if (tokens.empty() || !valid_identifier(tokens[0]))
    throw ParseError(line, "id", "pulse needs an identifier");
  Pulse p;
  p.name = std::string(tokens[0]);
  const auto kv = key_values(tokens.subspan(1), line);
  reject_unknown(kv, {"shape", "t0", "fwhm", "dur", "freq", "chirp", "phase",
                      "power", "rabi", "dir"},
                 line);

  const auto& shape = required(kv, "shape", line);
  if (shape == "gaussian") p.shape = PulseShape::gaussian;
  else if (shape == "chs") p.shape = PulseShape::chs;
  else if (shape == "square") p.shape = PulseShape::square;
  else throw ParseError(line, "shape", "unknown shape '" + shape + "'");

  p.t0 = quantity_field(kv, "t0", Quantity::time, line);

  const bool has_fwhm = kv.contains("fwhm");
  const bool has_dur = kv.contains("dur");
  if (has_fwhm == has_dur)
    throw ParseError(line, "fwhm", "exactly one of fwhm= or dur= is required");
  p.width = quantity_field(kv, has_fwhm ? "fwhm" : "dur", Quantity::time, line);
  if (!(p.width > 0.0))
    throw ParseError(line, has_fwhm ? "fwhm" : "dur", "must be positive");

  const auto& freq = required(kv, "freq", line);
  if (freq == "f0") {
    p.freq_label = FrequencyLabel::f0;
    p.freq_offset = levels.f0_offset;
  } else if (freq == "f+") {
    p.freq_label = FrequencyLabel::fplus;
    p.freq_offset = levels.fplus_offset;
  } else if (freq == "f-") {
    p.freq_label = FrequencyLabel::fminus;
    p.freq_offset = levels.fminus_offset;
  } else {
    p.freq_label = FrequencyLabel::explicit_offset;
    p.freq_offset = quantity_field(kv, "freq", Quantity::frequency, line);
  }

  if (kv.contains("chirp")) {
    p.chirp_bandwidth = quantity_field(kv, "chirp", Quantity::frequency, line);
    if (p.chirp_bandwidth < 0.0)
      throw ParseError(line, "chirp", "chirp bandwidth must be >= 0");
    if (p.chirp_bandwidth > 0.0 && p.shape != PulseShape::chs)
      throw ParseError(line, "chirp", "only chs pulses can be chirped");
  }
  if (kv.contains("phase")) p.phase = quantity_field(kv, "phase", Quantity::angle, line);

  if (kv.contains("power") && kv.contains("rabi"))
    throw ParseError(line, "power", "give either power= or rabi=, not both");
  if (kv.contains("power")) {
    p.peak_power = quantity_field(kv, "power", Quantity::power, line);
    if (*p.peak_power < 0.0) throw ParseError(line, "power", "must be >= 0");
  }
  if (kv.contains("rabi")) {
    p.rabi_hz = quantity_field(kv, "rabi", Quantity::frequency, line);
    if (*p.rabi_hz < 0.0) throw ParseError(line, "rabi", "must be >= 0");
  }

  const auto& dir = required(kv, "dir", line);
  if (dir == "+1" || dir == "1") p.direction = +1;
  else if (dir == "-1") p.direction = -1;
  else throw ParseError(line, "dir", "direction must be +1 or -1");
  return p;
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::two_pulse_echo: return "two_pulse_echo";
    case Scheme::afc: return "afc";
    case Scheme::spin_wave_afc: return "spin_wave_afc";
    case Scheme::rose: return "rose";
  }
  return "?";
}

std::optional<Scheme> scheme_from_string(std::string_view name) {
  for (auto s : {Scheme::two_pulse_echo, Scheme::afc, Scheme::spin_wave_afc,
                 Scheme::rose})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

double parse_quantity(std::string_view text, Quantity kind) {
  std::string_view body = text;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || !std::isfinite(value))
    throw std::invalid_argument("cannot parse number in '" + std::string(text) + "'");
  const std::string_view suffix(ptr, body.data() + body.size() - ptr);
  for (const auto& unit : units_for(kind))
    if (unit.suffix == suffix) return value * unit.scale;
  throw std::invalid_argument("unparsable unit suffix '" + std::string(suffix) +
                              "' in '" + std::string(text) + "'");
}

const Pulse* Sequence::find_pulse(std::string_view name) const {
  for (const auto& p : pulses)
    if (p.name == name) return &p;
  return nullptr;
}

const Pulse& Sequence::pulse(std::string_view name) const {
  if (const auto* p = find_pulse(name)) return *p;
  throw ConfigError("sequence has no pulse named '" + std::string(name) + "'");
}

Sequence parse_sequence(std::string_view text, const LevelScheme& levels) {
  Sequence seq;
  std::optional<Scheme> scheme;
  std::vector<std::size_t> window_lines;
  std::set<std::string, std::less<>> ids;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;

    const auto keyword = tokens[0];
    const std::span<const std::string_view> rest(tokens.begin() + 1, tokens.end());
    if (keyword == "directive") {
      const auto kv = key_values(rest, line_no);
      reject_unknown(kv, {"scheme"}, line_no);
      const auto& name = required(kv, "scheme", line_no);
      if (scheme) throw ParseError(line_no, "scheme", "scheme declared twice");
      scheme = scheme_from_string(name);
      if (!scheme) throw ParseError(line_no, "scheme", "unknown scheme '" + name + "'");
    } else if (keyword == "pulse") {
      Pulse p = parse_pulse(rest, line_no, levels);
      if (!ids.insert(p.name).second)
        throw ParseError(line_no, "id", "duplicate identifier '" + p.name + "'");
      seq.pulses.push_back(std::move(p));
    } else if (keyword == "window") {
      if (rest.empty() || !valid_identifier(rest[0]))
        throw ParseError(line_no, "id", "window needs an identifier");
      ReadoutWindow w;
      w.name = std::string(rest[0]);
      if (!ids.insert(w.name).second)
        throw ParseError(line_no, "id", "duplicate identifier '" + w.name + "'");
      const auto kv = key_values(rest.subspan(1), line_no);
      reject_unknown(kv, {"start", "end"}, line_no);
      w.start = quantity_field(kv, "start", Quantity::time, line_no);
      w.end = quantity_field(kv, "end", Quantity::time, line_no);
      if (!(w.end > w.start))
        throw ParseError(line_no, "end", "window must end after it starts");
      seq.windows.push_back(std::move(w));
      window_lines.push_back(line_no);
    } else {
      throw ParseError(line_no, std::string(keyword), "unknown key");
    }
  }

  if (!scheme) throw ParseError(0, "scheme", "scheme unset (no directive line)");
  seq.scheme = *scheme;

  if (!std::is_sorted(seq.pulses.begin(), seq.pulses.end(),
                      [](const Pulse& a, const Pulse& b) { return a.t0 < b.t0; })) {
    std::stable_sort(seq.pulses.begin(), seq.pulses.end(),
                     [](const Pulse& a, const Pulse& b) { return a.t0 < b.t0; });
    seq.warnings.push_back("pulses were not in time order; sorted by t0");
  }

  for (std::size_t i = 0; i < seq.windows.size(); ++i) {
    const auto& w = seq.windows[i];
    for (const auto& p : seq.pulses) {
      if (w.start < p.support_end() && w.end > p.support_start())
        throw ParseError(window_lines[i], "start",
                         "window '" + w.name + "' overlaps pulse '" + p.name + "'");
    }
  }
  return seq;
}

std::string serialize_sequence(const Sequence& sequence) {
  std::ostringstream out;
  out << "directive scheme=" << to_string(sequence.scheme) << '\n';
  for (const auto& p : sequence.pulses) {
    if (p.chirp_direction != 1)
      throw ConfigError("pulse '" + p.name +
                        "': down-chirped pulses have no file representation");
    out << "pulse " << p.name << " shape=" << to_string(p.shape)
        << " t0=" << format_double(p.t0) << 's'
        << (p.shape == PulseShape::gaussian ? " fwhm=" : " dur=")
        << format_double(p.width) << "s freq=";
    switch (p.freq_label) {
      case FrequencyLabel::f0: out << "f0"; break;
      case FrequencyLabel::fplus: out << "f+"; break;
      case FrequencyLabel::fminus: out << "f-"; break;
      case FrequencyLabel::explicit_offset:
        out << format_double(p.freq_offset) << "Hz";
        break;
    }
    if (p.chirp_bandwidth > 0.0) out << " chirp=" << format_double(p.chirp_bandwidth) << "Hz";
    if (p.phase != 0.0) out << " phase=" << format_double(p.phase) << "rad";
    // A calibrated pulse carries both; the power is the source of truth.
    if (p.peak_power)
      out << " power=" << format_double(*p.peak_power) << 'W';
    else if (p.rabi_hz)
      out << " rabi=" << format_double(*p.rabi_hz) << "Hz";
    out << " dir=" << (p.direction > 0 ? "+1" : "-1") << '\n';
  }
  for (const auto& w : sequence.windows)
    out << "window " << w.name << " start=" << format_double(w.start)
        << "s end=" << format_double(w.end) << "s\n";
  return out.str();
}

}  // namespace memsim
