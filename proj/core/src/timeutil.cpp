#include "evf/timeutil.hpp"

#include <cstdio>

#include "evf/errors.hpp"

namespace evf {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

std::int64_t hours_from_civil(const CivilTime& t) {
    return days_from_civil(t.year, t.month, t.day) * 24 + t.hour;
}

CivilTime civil_from_hours(std::int64_t h) {
    std::int64_t days = h / 24;
    int hour = static_cast<int>(h % 24);
    if (hour < 0) {
        hour += 24;
        --days;
    }
    CivilTime t;
    civil_from_days(days, t.year, t.month, t.day);
    t.hour = hour;
    return t;
}

int day_of_week(const CivilTime& t) {
    // 1970-01-01 was a Thursday (Mon=0 -> 3).
    std::int64_t z = days_from_civil(t.year, t.month, t.day);
    return static_cast<int>(((z % 7) + 7 + 3) % 7);
}

int day_of_year(const CivilTime& t) {
    return static_cast<int>(days_from_civil(t.year, t.month, t.day) -
                            days_from_civil(t.year, 1, 1)) +
           1;
}

int week_of_year(const CivilTime& t) {
    CivilTime jan1{t.year, 1, 1, 0};
    int jan1_dow = day_of_week(jan1);
    int first_monday = 1 + (7 - jan1_dow) % 7;
    int doy = day_of_year(t);
    if (doy < first_monday) return 0;
    return (doy - first_monday) / 7 + 1;
}

namespace {

// Day of month of the nth given weekday (Mon=0) in month m of year y.
int nth_weekday_of_month(int y, int m, int nth, int weekday) {
    CivilTime first{y, m, 1, 0};
    int dow = day_of_week(first);
    int day = 1 + (weekday - dow + 7) % 7 + (nth - 1) * 7;
    return day;
}

std::int64_t transition_std_hours(int y, int month, int nth, int weekday, int hour) {
    int day = nth_weekday_of_month(y, month, nth, weekday);
    return hours_from_civil(CivilTime{y, month, day, hour});
}

}  // namespace

bool dst_active_std(std::int64_t std_hours, const DstRule& rule) {
    CivilTime t = civil_from_hours(std_hours);
    std::int64_t start = transition_std_hours(t.year, rule.start_month, rule.start_nth,
                                              rule.start_weekday, rule.start_hour_std);
    std::int64_t end = transition_std_hours(t.year, rule.end_month, rule.end_nth,
                                            rule.end_weekday, rule.end_hour_std);
    return std_hours >= start && std_hours < end;
}

CivilTime wall_from_std(std::int64_t std_hours, const DstRule& rule) {
    return civil_from_hours(std_hours + (dst_active_std(std_hours, rule) ? 1 : 0));
}

ResolvedWall resolve_wall(const CivilTime& wall, const DstRule& rule) {
    std::int64_t h = hours_from_civil(wall);
    std::int64_t as_std = h;
    std::int64_t as_dst = h - 1;
    bool std_ok = !dst_active_std(as_std, rule);
    bool dst_ok = dst_active_std(as_dst, rule);
    ResolvedWall r{};
    r.std_hours_dst = as_dst;
    r.std_hours_std = as_std;
    if (std_ok && dst_ok) {
        r.kind = WallKind::Ambiguous;
    } else if (dst_ok) {
        r.kind = WallKind::Unique;
        r.dst = true;
    } else if (std_ok) {
        r.kind = WallKind::Unique;
        r.dst = false;
    } else {
        r.kind = WallKind::Nonexistent;
    }
    return r;
}

CivilTime parse_civil(const std::string& s) {
    CivilTime t;
    int minute = 0;
    char sep = 0;
    int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d", &t.year, &t.month, &t.day, &sep,
                        &t.hour, &minute);
    if (n < 6 || (sep != 'T' && sep != ' ') || t.month < 1 || t.month > 12 ||
        t.day < 1 || t.day > 31 || t.hour < 0 || t.hour > 23)
        throw DataError("unparseable timestamp: '" + s + "'");
    return t;
}

std::string format_civil(const CivilTime& t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00", t.year, t.month, t.day,
                  t.hour);
    return buf;
}

}  // namespace evf
