#pragma once

#include <cstdio>
#include <string>

namespace memsim {

// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace memsim
