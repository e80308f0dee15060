#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

namespace frontier {

/// %.{digits}g rendering; "nan" / "inf" / "-inf" for non-finite values.
inline std::string format_number(double v, int digits = 10) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v, int digits = 10) {
  return v ? format_number(*v, digits) : std::string("NA");
}

}  // namespace frontier
