#include "helioscore/timeutil.hpp"

#include <cstdio>
#include <stdexcept>

namespace helioscore {

// Howard Hinnant's civil-date algorithms, valid over the full proleptic
// Gregorian calendar.
std::int64_t days_from_civil(int year, int month, int day) {
    const std::int64_t y = year - (month <= 2 ? 1 : 0);
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        (153u * static_cast<unsigned>(month + (month > 2 ? -3 : 9)) + 2u) / 5u +
        static_cast<unsigned>(day) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t days) {
    const std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));
    return CivilDate{static_cast<int>(y + (m <= 2 ? 1 : 0)),
                     static_cast<int>(m), static_cast<int>(d)};
}

TimestampS timestamp_from_civil(int year, int month, int day,
                                int hour, int minute, int second) {
    return days_from_civil(year, month, day) * 86400
         + hour * 3600 + minute * 60 + second;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::int64_t utc_day_index(TimestampS ts) { return floor_div(ts, 86400); }

int seconds_of_day(TimestampS ts) {
    return static_cast<int>(ts - utc_day_index(ts) * 86400);
}

int day_of_year(TimestampS ts) {
    const CivilDate d = civil_from_days(utc_day_index(ts));
    return static_cast<int>(utc_day_index(ts) - days_from_civil(d.year, 1, 1)) + 1;
}

int utc_year(TimestampS ts) { return civil_from_days(utc_day_index(ts)).year; }

int utc_month(TimestampS ts) { return civil_from_days(utc_day_index(ts)).month; }

namespace {

bool valid_civil(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1) return false;
    static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int max_day = lengths[month - 1];
    if (month == 2) {
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        if (leap) max_day = 29;
    }
    return day <= max_day;
}

}  // namespace

TimestampS parse_iso8601_utc(const std::string& text) {
    int y, mo, d, h, mi, s;
    char tail = '\0';
    if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c",
                    &y, &mo, &d, &h, &mi, &s, &tail) != 7 ||
        tail != 'Z' || text.size() != 20) {
        throw std::invalid_argument("bad ISO-8601 UTC timestamp: '" + text + "'");
    }
    if (!valid_civil(y, mo, d) || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        s < 0 || s > 59) {
        throw std::invalid_argument("out-of-range ISO-8601 timestamp: '" + text + "'");
    }
    return timestamp_from_civil(y, mo, d, h, mi, s);
}

TimestampS parse_iso8601_date(const std::string& text) {
    int y, mo, d;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2d", &y, &mo, &d) != 3 ||
        text.size() != 10 || !valid_civil(y, mo, d)) {
        throw std::invalid_argument("bad ISO-8601 date: '" + text + "'");
    }
    return timestamp_from_civil(y, mo, d);
}

std::string format_iso8601_utc(TimestampS ts) {
    const CivilDate date = civil_from_days(utc_day_index(ts));
    const int sod = seconds_of_day(ts);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  date.year, date.month, date.day,
                  sod / 3600, (sod / 60) % 60, sod % 60);
    return buf;
}

}  // namespace helioscore
