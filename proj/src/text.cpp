#include "uqlb/text.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include "uqlb/error.hpp"

namespace uqlb {

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view s) {
  s = trim(s);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(s) + "'");
  }
  return value;
}

long long parse_int(std::string_view s) {
  s = trim(s);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, "not an integer: '" + std::string(s) + "'");
  }
  return value;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_seconds(std::chrono::nanoseconds t) {
  std::int64_t ns = t.count();
  std::string sign;
  if (ns < 0) {
    sign = "-";
    ns = -ns;
  }
  std::string frac = std::to_string(ns % 1'000'000'000);
  frac.insert(0, 9 - frac.size(), '0');
  return sign + std::to_string(ns / 1'000'000'000) + "." + frac;
}

std::chrono::nanoseconds parse_seconds(std::string_view s) {
  s = trim(s);
  // Exact path for the fixed nine-decimal form written by format_seconds.
  const auto dot = s.find('.');
  if (dot != std::string_view::npos && s.size() - dot - 1 == 9 && s.find_first_of("eE") == std::string_view::npos) {
    const bool negative = !s.empty() && s.front() == '-';
    const auto whole = parse_int(s.substr(negative ? 1 : 0, dot - (negative ? 1 : 0)));
    const auto frac = parse_int(s.substr(dot + 1));
    const std::int64_t ns = whole * 1'000'000'000 + frac;
    return std::chrono::nanoseconds(negative ? -ns : ns);
  }
  return seconds_to_ns(parse_double(s));
}

}  // namespace uqlb
