#include "evf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>

#include "evf/errors.hpp"

namespace evf {

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = {
        "consumption", "temperature",  "day_of_week",  "quarter",
        "month",       "day_of_year",  "day_of_month", "week_of_year",
        "hour_of_day", "year",         "dst_flag"};
    return names;
}

Vector row_features(const TimeTableRow& r) {
    return {r.consumption,
            r.temperature,
            static_cast<double>(r.day_of_week),
            static_cast<double>(r.quarter),
            static_cast<double>(r.month),
            static_cast<double>(r.day_of_year),
            static_cast<double>(r.day_of_month),
            static_cast<double>(r.week_of_year),
            static_cast<double>(r.hour_of_day),
            static_cast<double>(r.year),
            static_cast<double>(r.dst_flag)};
}

WeatherSeries fill_missing_temperature(const WeatherSeries& ws) {
    const auto& in = ws.readings;
    bool any_present = std::any_of(in.begin(), in.end(),
                                   [](const auto& r) { return r.temperature_c.has_value(); });
    if (!any_present)
        throw DataError("station '" + ws.station_id +
                        "': all temperatures missing, gap unrecoverable");

    WeatherSeries out = ws;
    const std::size_t n = in.size();
    // prev_present[i]: index of nearest present reading at or before i; -1 none.
    std::vector<std::ptrdiff_t> prev(n, -1), next(n, -1);
    std::ptrdiff_t last = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (in[i].temperature_c) last = static_cast<std::ptrdiff_t>(i);
        prev[i] = last;
    }
    last = -1;
    for (std::size_t i = n; i-- > 0;) {
        if (in[i].temperature_c) last = static_cast<std::ptrdiff_t>(i);
        next[i] = last;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (in[i].temperature_c) continue;
        const std::ptrdiff_t p = prev[i], q = next[i];
        double filled;
        if (p >= 0 && q >= 0) {
            const double dp = static_cast<double>(i - p);
            const double dq = static_cast<double>(q - static_cast<std::ptrdiff_t>(i));
            const double wp = 1.0 / dp, wq = 1.0 / dq;
            filled = (*in[p].temperature_c * wp + *in[q].temperature_c * wq) / (wp + wq);
        } else if (p >= 0) {
            filled = *in[p].temperature_c;
        } else {
            filled = *in[q].temperature_c;
        }
        out.readings[i].temperature_c = filled;
    }
    return out;
}

WeatherSeries average_stations(const std::vector<WeatherSeries>& all) {
    if (all.empty()) throw DataError("average_stations: no stations");
    const auto& ref = all.front();
    for (const auto& ws : all) {
        if (ws.readings.size() != ref.readings.size()) {
            throw DataError("average_stations: station '" + ws.station_id + "' has " +
                            std::to_string(ws.readings.size()) + " rows, '" +
                            ref.station_id + "' has " +
                            std::to_string(ref.readings.size()));
        }
        for (std::size_t i = 0; i < ws.readings.size(); ++i) {
            if (ws.readings[i].timestamp != ref.readings[i].timestamp)
                throw DataError("average_stations: grid mismatch at " +
                                format_civil(ws.readings[i].timestamp) + " (station '" +
                                ws.station_id + "')");
            if (!ws.readings[i].temperature_c)
                throw DataError("average_stations: missing temperature at " +
                                format_civil(ws.readings[i].timestamp) +
                                " (fill gaps first)");
        }
    }
    WeatherSeries avg;
    avg.station_id = "average";
    avg.readings = ref.readings;
    for (std::size_t i = 0; i < avg.readings.size(); ++i) {
        double acc = 0.0;
        for (const auto& ws : all) acc += *ws.readings[i].temperature_c;
        avg.readings[i].temperature_c = acc / static_cast<double>(all.size());
    }
    return avg;
}

std::vector<int> dst_annotate(const std::vector<CivilTime>& timestamps,
                              const DstRule& rule) {
    std::vector<int> flags(timestamps.size(), 1);
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        const ResolvedWall r = resolve_wall(timestamps[i], rule);
        bool duplicate_second = i > 0 && timestamps[i] == timestamps[i - 1];
        if (duplicate_second && i > 1 && timestamps[i] == timestamps[i - 2])
            throw DataError("triplicate timestamp " + format_civil(timestamps[i]));
        switch (r.kind) {
            case WallKind::Unique:
                flags[i] = r.dst ? 0 : 1;
                break;
            case WallKind::Ambiguous:
                // First occurrence is still on DST, the repeat is standard time.
                flags[i] = duplicate_second ? 1 : 0;
                break;
            case WallKind::Nonexistent:
                flags[i] = 1;
                break;
        }
    }
    return flags;
}

namespace {

TimeTableRow engineer(const CivilTime& ts, int dst_flag, double temperature,
                      double consumption) {
    TimeTableRow r;
    r.timestamp = ts;
    r.dst_flag = dst_flag;
    r.temperature = temperature;
    r.consumption = consumption;
    r.day_of_week = day_of_week(ts);
    r.month = ts.month;
    r.quarter = (ts.month - 1) / 3 + 1;
    r.day_of_year = day_of_year(ts);
    r.day_of_month = ts.day;
    r.week_of_year = week_of_year(ts);
    r.hour_of_day = ts.hour;
    r.year = ts.year;
    return r;
}

}  // namespace

TimeTable merge(const HouseholdSeries& h, const WeatherSeries& w, const DstRule& rule,
                PipelineLog* log) {
    std::vector<CivilTime> wts(w.readings.size());
    for (std::size_t i = 0; i < wts.size(); ++i) wts[i] = w.readings[i].timestamp;
    std::vector<int> wflags = dst_annotate(wts, rule);

    std::map<std::pair<CivilTime, int>, double> temp_by_key;
    for (std::size_t i = 0; i < wts.size(); ++i) {
        if (!w.readings[i].temperature_c)
            throw DataError("merge: missing temperature at " + format_civil(wts[i]));
        auto [it, inserted] =
            temp_by_key.emplace(std::make_pair(wts[i], wflags[i]),
                                *w.readings[i].temperature_c);
        if (!inserted)
            throw DataError("merge: duplicate weather key " + format_civil(wts[i]) +
                            " dst=" + std::to_string(wflags[i]));
    }

    std::vector<CivilTime> hts(h.readings.size());
    for (std::size_t i = 0; i < hts.size(); ++i) hts[i] = h.readings[i].interval_start;
    std::vector<int> hflags = dst_annotate(hts, rule);

    TimeTable t;
    std::map<std::pair<CivilTime, int>, bool> seen;
    for (std::size_t i = 0; i < hts.size(); ++i) {
        auto key = std::make_pair(hts[i], hflags[i]);
        if (seen.count(key))
            throw DataError("merge: duplicate household key " + format_civil(hts[i]) +
                            " dst=" + std::to_string(hflags[i]));
        seen[key] = true;
        auto it = temp_by_key.find(key);
        if (it == temp_by_key.end()) continue;  // inner join: drop unmatched
        t.rows.push_back(
            engineer(hts[i], hflags[i], it->second, h.readings[i].consumption_kwh));
    }
    if (!h.readings.empty()) {
        const double coverage =
            static_cast<double>(t.rows.size()) / static_cast<double>(h.readings.size());
        if (coverage < 0.9 && log)
            log->warn("merge: join kept only " +
                      std::to_string(static_cast<int>(coverage * 100.0)) +
                      "% of household rows");
    }
    return t;
}

TimeTable lockdown_filter(const TimeTable& t, const CivilTime& cutoff) {
    TimeTable out;
    for (const auto& r : t.rows)
        if (r.timestamp < cutoff) out.rows.push_back(r);
    return out;
}

SplitTable split(const TimeTable& t) {
    const std::size_t n = t.rows.size();
    const std::size_t n_val = n / 10;
    const std::size_t n_test = n / 10;
    if (n_val == 0 || n_test == 0)
        throw DataError("split: only " + std::to_string(n) +
                        " rows, need at least 10");
    const std::size_t n_train = n - n_val - n_test;
    SplitTable s;
    s.train.rows.assign(t.rows.begin(), t.rows.begin() + n_train);
    s.val.rows.assign(t.rows.begin() + n_train, t.rows.begin() + n_train + n_val);
    s.test.rows.assign(t.rows.begin() + n_train + n_val, t.rows.end());
    return s;
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

NormalizedTable apply_stats(const TimeTable& t, const NormStats& stats) {
    NormalizedTable out;
    std::size_t kept = 0;
    for (std::size_t j = 0; j < stats.names.size(); ++j)
        if (!stats.dropped[j]) ++kept;
    out.features = Matrix(t.rows.size(), kept);
    out.raw_consumption.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const Vector f = row_features(t.rows[i]);
        std::size_t c = 0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (stats.dropped[j]) continue;
            out.features(i, c++) =
                stats.scaled[j] ? (f[j] - stats.mean[j]) / stats.sigma[j] : f[j];
        }
        out.raw_consumption.push_back(t.rows[i].consumption);
        out.timestamps.push_back(t.rows[i].timestamp);
        out.dst_flags.push_back(t.rows[i].dst_flag);
    }
    return out;
}

}  // namespace

NormalizedSplit normalize(const SplitTable& s, NormStats& stats, bool stats_given,
                          PipelineLog* log) {
    const auto& names = feature_names();
    if (!stats_given) {
        if (s.train.rows.empty()) throw DataError("normalize: empty training split");
        const std::size_t n = s.train.rows.size();
        const std::size_t f = names.size();
        stats = NormStats{};
        stats.names = names;
        stats.mean.assign(f, 0.0);
        stats.sigma.assign(f, 0.0);
        stats.scaled.assign(f, true);
        stats.dropped.assign(f, false);
        stats.scaled[f - 1] = false;  // dst_flag is binary, passes through

        for (const auto& r : s.train.rows) {
            const Vector v = row_features(r);
            for (std::size_t j = 0; j < f; ++j) stats.mean[j] += v[j];
        }
        for (std::size_t j = 0; j < f; ++j) stats.mean[j] /= static_cast<double>(n);
        for (const auto& r : s.train.rows) {
            const Vector v = row_features(r);
            for (std::size_t j = 0; j < f; ++j) {
                const double d = v[j] - stats.mean[j];
                stats.sigma[j] += d * d;
            }
        }
        for (std::size_t j = 0; j < f; ++j)
            stats.sigma[j] = std::sqrt(stats.sigma[j] / static_cast<double>(n));

        for (std::size_t j = 0; j < f; ++j) {
            if (!stats.scaled[j]) continue;
            if (stats.sigma[j] == 0.0) {
                if (j == 0)
                    throw DataError("normalize: consumption is constant on the training split");
                stats.dropped[j] = true;
                if (log) log->warn("normalize: dropping constant feature '" + names[j] + "'");
            }
        }
        std::uint64_t h = fnv1a(stats.mean.data(), stats.mean.size() * sizeof(double));
        h = fnv1a(stats.sigma.data(), stats.sigma.size() * sizeof(double), h);
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        stats.id = buf;
    }

    NormalizedSplit out;
    out.train = apply_stats(s.train, stats);
    out.val = apply_stats(s.val, stats);
    out.test = apply_stats(s.test, stats);
    for (std::size_t j = 0; j < stats.names.size(); ++j)
        if (!stats.dropped[j]) out.kept_names.push_back(stats.names[j]);
    return out;
}

WindowedDataset window(const NormalizedTable& t, std::size_t w, std::size_t s) {
    if (s == 0) throw ConfigError("window: slide step must be >= 1");
    const std::size_t T = t.features.rows;
    if (T <= w)
        throw DataError("window: " + std::to_string(T) +
                        " rows cannot fill a window of " + std::to_string(w));
    WindowedDataset ds;
    ds.window = w;
    ds.slide = s;
    ds.features = t.features.cols;
    const std::size_t count = (T - w - 1) / s + 1;
    ds.inputs.reserve(count);
    ds.targets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t start = i * s;
        Matrix in(w, ds.features);
        for (std::size_t r = 0; r < w; ++r)
            std::copy(t.features.row(start + r), t.features.row(start + r) + ds.features,
                      in.row(r));
        ds.inputs.push_back(std::move(in));
        ds.targets.push_back(t.features(start + w, 0));  // normalized consumption
    }
    return ds;
}

std::vector<CivilTime> window_target_times(const NormalizedTable& t, std::size_t w,
                                           std::size_t s) {
    const std::size_t T = t.timestamps.size();
    std::vector<CivilTime> out;
    if (T <= w || s == 0) return out;
    const std::size_t count = (T - w - 1) / s + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(t.timestamps[i * s + w]);
    return out;
}

}  // namespace evf
