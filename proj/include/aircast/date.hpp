#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace aircast {

using Date = std::chrono::sys_days;

Date make_date(int year, unsigned month, unsigned day);

/// True when year/month/day names a real calendar day.
bool is_valid_date(int year, int month, int day);

/// YYYY-MM-DD.
std::string to_iso(Date date);

/// Parses YYYY-MM-DD; throws ParseError on malformed input.
Date parse_iso(std::string_view text);

/// Whole days since 1970-01-01 (negative before the epoch).
inline long long days_since_epoch(Date date) {
    return date.time_since_epoch().count();
}

} // namespace aircast
