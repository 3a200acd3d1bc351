#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace gridtwin {

using Timestamp = std::chrono::sys_seconds;

/// Measurement interval length.
inline constexpr std::chrono::minutes kInterval{15};
inline constexpr double kIntervalHours = 0.25;

/// Parses an ISO-8601 UTC instant. Accepts `YYYY-MM-DDTHH:MM[:SS]` followed
/// by `Z` or `+00:00` (a bare local time is treated as UTC).
/// Throws DataError on malformed input.
Timestamp parse_timestamp(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp t);

bool on_interval_grid(Timestamp t);

}  // namespace gridtwin
