#include "fcc/common/decimal.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace fcc {

std::optional<Decimal> Decimal::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty()) return std::nullopt;
  if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
  if (frac.size() > 6) return std::nullopt;

  constexpr std::int64_t kMaxWhole = std::numeric_limits<std::int64_t>::max() / kScale - 1;
  std::int64_t units = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') return std::nullopt;
    units = units * 10 + (c - '0');
    if (units > kMaxWhole) return std::nullopt;
  }
  std::int64_t fraction = 0;
  std::int64_t weight = kScale;
  for (char c : frac) {
    if (c < '0' || c > '9') return std::nullopt;
    weight /= 10;
    fraction += (c - '0') * weight;
  }
  std::int64_t micros = units * kScale + fraction;
  return from_micros(negative ? -micros : micros);
}

std::optional<Decimal> Decimal::from_double(double value) {
  if (!std::isfinite(value)) return std::nullopt;
  std::array<char, 400> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
  if (ec != std::errc{}) return std::nullopt;
  return parse(std::string_view(buf.data(), static_cast<std::size_t>(end - buf.data())));
}

std::string Decimal::to_string() const {
  const bool negative = micros_ < 0;
  // Magnitude via unsigned arithmetic so INT64_MIN does not overflow.
  const std::uint64_t magnitude = negative ? std::uint64_t(0) - static_cast<std::uint64_t>(micros_)
                                           : static_cast<std::uint64_t>(micros_);
  std::string out = negative ? "-" : "";
  out += std::to_string(magnitude / kScale);
  std::uint64_t frac = magnitude % kScale;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

}  // namespace fcc
