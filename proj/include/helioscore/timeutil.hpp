#pragma once

#include <cstdint>
#include <string>

namespace helioscore {

/// UTC instant as seconds since the Unix epoch. All timestamps in the
/// library are UTC; calendar-day boundaries are UTC days.
using TimestampS = std::int64_t;

/// Duration in seconds.
using DurationS = std::int64_t;

struct CivilDate {
    int year;
    int month;  // 1..12
    int day;    // 1..31
};

/// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, int month, int day);

/// Inverse of days_from_civil.
CivilDate civil_from_days(std::int64_t days);

TimestampS timestamp_from_civil(int year, int month, int day,
                                int hour = 0, int minute = 0, int second = 0);

/// 1-based day of year for the UTC day containing ts.
int day_of_year(TimestampS ts);

/// Seconds elapsed since UTC midnight of the day containing ts.
int seconds_of_day(TimestampS ts);

/// UTC day index (floor of ts / 86400), usable as a grouping key.
std::int64_t utc_day_index(TimestampS ts);

/// Calendar year of the UTC day containing ts.
int utc_year(TimestampS ts);

/// Calendar month (1..12) of the UTC day containing ts.
int utc_month(TimestampS ts);

/// Parses strict "YYYY-MM-DDTHH:MM:SSZ". Throws std::invalid_argument on
/// malformed input or out-of-range fields.
TimestampS parse_iso8601_utc(const std::string& text);

/// Parses strict "YYYY-MM-DD" into a UTC-midnight timestamp.
TimestampS parse_iso8601_date(const std::string& text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601_utc(TimestampS ts);

}  // namespace helioscore
