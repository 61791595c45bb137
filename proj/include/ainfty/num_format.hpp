#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace ainfty {

/// Shortest decimal string that round-trips to the same double, the form
/// used for CSV cells, JSON map keys, and witness annotations.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace ainfty
