#pragma once

#include <cstdint>
#include <string>

namespace evf {

/// Local wall-clock date and time at hourly resolution.
struct CivilTime {
    int year = 1970;
    int month = 1;  // 1-12
    int day = 1;    // 1-31
    int hour = 0;   // 0-23

    auto operator<=>(const CivilTime&) const = default;
};

/// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int y, int m, int d);
void civil_from_days(std::int64_t z, int& y, int& m, int& d);

/// Hours since 1970-01-01 00:00, treating the civil time as a fixed-offset
/// (standard, DST-free) clock.
std::int64_t hours_from_civil(const CivilTime& t);
CivilTime civil_from_hours(std::int64_t h);

/// Weekday with Monday = 0 ... Sunday = 6.
int day_of_week(const CivilTime& t);
int day_of_year(const CivilTime& t);
/// Week number 0-53; weeks start on Monday, days before the first Monday of
/// the year fall in week 0.
int week_of_year(const CivilTime& t);

/// DST transition rule expressed in local standard time. The default matches
/// the North American rule: DST starts at 02:00 standard time on the
/// start_nth start_weekday of start_month and ends one hour earlier on the
/// wall clock (01:00 standard) on the end_nth end_weekday of end_month.
struct DstRule {
    int start_month = 3;
    int start_nth = 2;      // second Sunday
    int start_weekday = 6;  // Monday=0
    int start_hour_std = 2;
    int end_month = 11;
    int end_nth = 1;  // first Sunday
    int end_weekday = 6;
    int end_hour_std = 1;  // 02:00 DST == 01:00 standard
};

/// True when the instant (given in local standard hours) is inside DST.
bool dst_active_std(std::int64_t std_hours, const DstRule& rule);

/// Wall-clock time for an instant on the standard-time axis.
CivilTime wall_from_std(std::int64_t std_hours, const DstRule& rule);

enum class WallKind { Unique, Ambiguous, Nonexistent };

struct ResolvedWall {
    WallKind kind;
    std::int64_t std_hours_dst;  // interpretation with DST active (valid unless Nonexistent)
    std::int64_t std_hours_std;  // interpretation without DST
    bool dst;                    // for Unique: whether the single interpretation is DST
};

/// Maps a wall-clock time back onto the standard-time axis, detecting the
/// fall-back duplicated hour and the spring-forward gap.
ResolvedWall resolve_wall(const CivilTime& wall, const DstRule& rule);

/// "YYYY-MM-DDTHH:MM" (also accepts a space separator and trailing ":SS").
CivilTime parse_civil(const std::string& s);
std::string format_civil(const CivilTime& t);

}  // namespace evf
