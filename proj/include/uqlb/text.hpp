#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace uqlb {

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view s, char sep);

// Strict: the whole (trimmed) token must be a finite or infinite decimal.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

// Integer nanoseconds rendered as seconds with exactly nine decimals, so
// that identical clocks give byte-identical text.
std::string format_seconds(std::chrono::nanoseconds t);
std::chrono::nanoseconds parse_seconds(std::string_view s);

inline std::chrono::nanoseconds seconds_to_ns(double s) {
  return std::chrono::nanoseconds(static_cast<std::int64_t>(std::llround(s * 1e9)));
}
inline double to_seconds(std::chrono::nanoseconds t) { return static_cast<double>(t.count()) * 1e-9; }

}  // namespace uqlb
