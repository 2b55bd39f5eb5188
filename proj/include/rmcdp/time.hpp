#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rmcdp {

// Durations and times of day are whole seconds; a time of day counts from
// midnight.
using Seconds = std::int64_t;

constexpr Seconds minutes(std::int64_t m) { return m * 60; }
constexpr Seconds hours(std::int64_t h) { return h * 3600; }

// "H:MM", 24-hour, no wrap past midnight. Seconds are dropped when zero and
// rendered as ":SS" otherwise.
inline std::string format_hmm(Seconds t) {
  const bool negative = t < 0;
  if (negative) t = -t;
  const auto h = t / 3600;
  const auto m = (t / 60) % 60;
  const auto s = t % 60;
  std::string out = negative ? "-" : "";
  out += std::to_string(h);
  out += ':';
  if (m < 10) out += '0';
  out += std::to_string(m);
  if (s != 0) {
    out += ':';
    if (s < 10) out += '0';
    out += std::to_string(s);
  }
  return out;
}

// Accepts "H:MM", "HH:MM" or "H:MM:SS".
inline std::optional<Seconds> parse_hmm(std::string_view text) {
  Seconds parts[3] = {0, 0, 0};
  int count = 0;
  for (;;) {
    if (count == 3) return std::nullopt;
    const auto colon = text.find(':');
    const auto field = text.substr(0, colon);
    Seconds value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
    parts[count++] = value;
    if (colon == std::string_view::npos) break;
    text.remove_prefix(colon + 1);
  }
  if (count < 2 || parts[0] < 0 || parts[1] < 0 || parts[2] < 0 || parts[1] >= 60 || parts[2] >= 60) return std::nullopt;
  return parts[0] * 3600 + parts[1] * 60 + parts[2];
}

// Minutes as a decimal string, e.g. 90 or 7.5.
inline std::string format_minutes(Seconds t) {
  if (t % 60 == 0) return std::to_string(t / 60);
  std::string out = std::to_string(static_cast<double>(t) / 60.0);
  while (!out.empty() && out.back() == '0') out.pop_back();
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

}  // namespace rmcdp
