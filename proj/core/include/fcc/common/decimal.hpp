#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fcc {

/// Fixed-point decimal with six fractional digits, stored as an integer
/// count of millionths. Used for USD amounts and configuration weights so
/// that comparisons, sums and canonical rendering are exact.
class Decimal {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Decimal() = default;
  static constexpr Decimal from_micros(std::int64_t micros) {
    Decimal d;
    d.micros_ = micros;
    return d;
  }
  static constexpr Decimal from_int(std::int64_t units) { return from_micros(units * kScale); }

  /// Accepts `[-]digits[.digits]` with at most six fractional digits.
  static std::optional<Decimal> parse(std::string_view text);
  /// Converts through the shortest round-trip fixed rendering of `value`.
  static std::optional<Decimal> from_double(double value);

  constexpr std::int64_t micros() const { return micros_; }
  double to_double() const { return static_cast<double>(micros_) / kScale; }
  bool is_negative() const { return micros_ < 0; }

  /// Canonical rendering: no trailing zeros, no trailing dot ("62", "62.5").
  std::string to_string() const;

  friend constexpr Decimal operator+(Decimal a, Decimal b) { return from_micros(a.micros_ + b.micros_); }
  friend constexpr Decimal operator-(Decimal a, Decimal b) { return from_micros(a.micros_ - b.micros_); }
  Decimal& operator+=(Decimal other) {
    micros_ += other.micros_;
    return *this;
  }

  friend constexpr auto operator<=>(Decimal, Decimal) = default;
  friend constexpr bool operator==(Decimal, Decimal) = default;

 private:
  std::int64_t micros_ = 0;
};

}  // namespace fcc
