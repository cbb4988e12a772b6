#pragma once

#include <cstdio>
#include <string>

namespace roughldp::csv {

/// Full-precision rendering used by every CSV writer (17 significant digits).
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace roughldp::csv
