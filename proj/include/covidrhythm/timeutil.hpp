#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace covidrhythm {

// Seconds since the Unix epoch, UTC.
using Instant = std::int64_t;

constexpr Instant kSecondsPerDay = 86400;
constexpr Instant kSecondsPerMinute = 60;

// Parses "YYYY-MM-DDTHH:MM:SS" (optional trailing 'Z', optional " " instead
// of 'T', optional fractional seconds which are truncated). Returns nullopt
// on malformed input.
std::optional<Instant> parse_iso8601(const std::string& s);

// Parses "YYYY-MM-DD" into the instant at 00:00:00 UTC of that date.
std::optional<Instant> parse_date(const std::string& s);

std::string format_iso8601(Instant t);
std::string format_date(Instant t);

// Midnight (00:00) of the day containing t, shifted by a fixed UTC offset
// expressed in minutes.
Instant day_start(Instant t, int utc_offset_minutes = 0);

}  // namespace covidrhythm
