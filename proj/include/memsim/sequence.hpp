#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memsim/pulse.hpp"
#include "memsim/spectral.hpp"

namespace memsim {

enum class Scheme { two_pulse_echo, afc, spin_wave_afc, rose };

std::string to_string(Scheme scheme);
std::optional<Scheme> scheme_from_string(std::string_view name);

struct ReadoutWindow {
  std::string name;
  double start{0.0};
  double end{0.0};

  friend bool operator==(const ReadoutWindow&, const ReadoutWindow&) = default;
};

// Ordered experiment timeline.
struct Sequence {
  Scheme scheme{Scheme::two_pulse_echo};
  std::vector<Pulse> pulses;
  std::vector<ReadoutWindow> windows;
  // Non-fatal notes from parsing (e.g. pulses re-sorted by t0).
  std::vector<std::string> warnings;

  const Pulse& pulse(std::string_view name) const;
  const Pulse* find_pulse(std::string_view name) const;

  friend bool operator==(const Sequence& a, const Sequence& b) {
    return a.scheme == b.scheme && a.pulses == b.pulses &&
           a.windows == b.windows;
  }
};

// Line-oriented sequence format:
//
//   directive scheme=<two_pulse_echo|afc|spin_wave_afc|rose>
//   pulse <id> shape=<gaussian|chs|square> t0=<time> fwhm=<time>|dur=<time>
//         freq=<f0|f+|f-|offset> [chirp=<freq>] [phase=<angle>]
//         [power=<power>|rabi=<freq>] dir=<+1|-1>
//   window <id> start=<time> end=<time>
//
// Units: ns us ms s / Hz kHz MHz GHz / deg rad / mW W. '#' starts a
// comment. `rabi` is given as Rabi frequency over 2 pi.
Sequence parse_sequence(std::string_view text,
                        const LevelScheme& levels = LevelScheme::europium151());

std::string serialize_sequence(const Sequence& sequence);

enum class Quantity { time, frequency, angle, power };

// Number with unit suffix, converted to SI (s, Hz, rad, W). Throws
// std::invalid_argument on a malformed number or unknown suffix.
double parse_quantity(std::string_view text, Quantity kind);

}  // namespace memsim
