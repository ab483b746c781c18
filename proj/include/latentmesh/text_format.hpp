#pragma once

#include <cstdio>
#include <string>

namespace latentmesh {

// All text serialization in the project writes reals with 9 significant
// digits.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace latentmesh
