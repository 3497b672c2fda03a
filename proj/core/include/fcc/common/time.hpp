#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace fcc {

using Timestamp = std::chrono::sys_seconds;
using std::chrono::seconds;

inline constexpr seconds kDay{86'400};

constexpr seconds days(long long n) { return kDay * n; }

/// Parses RFC 3339 (`2025-05-01T12:00:00Z`, lower-case separators and
/// numeric offsets accepted). Fractional seconds are truncated; the result
/// is normalized to UTC.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Renders `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_rfc3339(Timestamp ts);

/// Whole days elapsed from `from` to `to`, floored.
long long whole_days_between(Timestamp from, Timestamp to);

/// Wall clock truncated to seconds.
Timestamp now_utc();

}  // namespace fcc
