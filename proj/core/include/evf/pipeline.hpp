#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evf/dataset.hpp"
#include "evf/timeutil.hpp"

namespace evf {

struct WeatherReading {
    CivilTime timestamp;
    std::optional<double> temperature_c;
};

struct WeatherSeries {
    std::string station_id;
    std::vector<WeatherReading> readings;
};

struct HouseholdReading {
    CivilTime interval_start;
    double consumption_kwh = 0.0;
};

struct HouseholdSeries {
    std::string household_id;
    std::vector<HouseholdReading> readings;
};

/// Merged weather + consumption row with the engineered calendar features.
struct TimeTableRow {
    CivilTime timestamp;
    int dst_flag = 1;  // 1 not-DST, 0 DST
    double temperature = 0.0;
    double consumption = 0.0;
    int day_of_week = 0;   // 0-6, Monday first
    int quarter = 1;       // 1-4
    int month = 1;         // 1-12
    int day_of_year = 1;   // 1-366
    int day_of_month = 1;  // 1-31
    int week_of_year = 0;  // 0-53, weeks start Monday
    int hour_of_day = 0;   // 0-23
    int year = 1970;
};

struct TimeTable {
    std::vector<TimeTableRow> rows;
};

/// Collects non-fatal pipeline messages (coverage shortfalls, dropped
/// constant features).
struct PipelineLog {
    std::vector<std::string> warnings;
    void warn(std::string msg) { warnings.push_back(std::move(msg)); }
};

/// Per-feature z-score statistics, computed on training rows only.
/// Population standard deviation (divide by N) throughout.
struct NormStats {
    std::vector<std::string> names;
    std::vector<double> mean;
    std::vector<double> sigma;
    std::vector<bool> scaled;   // false: passes through unscaled (dst_flag)
    std::vector<bool> dropped;  // constant features
    std::string id;             // fingerprint recorded into trained models

    std::size_t consumption_index() const { return 0; }
    double consumption_mean() const { return mean[0]; }
    double consumption_sigma() const { return sigma[0]; }
    /// Normalized prediction -> kWh.
    double inverse_consumption(double z) const {
        return z * consumption_sigma() + consumption_mean();
    }
};

/// Fixed feature order of a TimeTable row; consumption first.
const std::vector<std::string>& feature_names();
Vector row_features(const TimeTableRow& row);

// --- preparation pipeline stages ------------------------------------------

/// Replaces each missing temperature with the inverse-time-distance weighted
/// mean of the nearest present readings; edge gaps take the single nearest
/// value. Idempotent.
WeatherSeries fill_missing_temperature(const WeatherSeries& ws);

/// Per-timestamp arithmetic mean across stations. All grids must match.
WeatherSeries average_stations(const std::vector<WeatherSeries>& all);

/// DST flag per timestamp: 1 not-DST / 0 DST. For fall-back duplicate pairs
/// the first occurrence gets 0 (DST), the second 1.
std::vector<int> dst_annotate(const std::vector<CivilTime>& timestamps,
                              const DstRule& rule);

/// Inner join on (timestamp, dst_flag) plus calendar feature engineering.
TimeTable merge(const HouseholdSeries& h, const WeatherSeries& w, const DstRule& rule,
                PipelineLog* log = nullptr);

/// Keeps rows strictly before the cutoff date-time.
TimeTable lockdown_filter(const TimeTable& t, const CivilTime& cutoff);

struct SplitTable {
    TimeTable train, val, test;
};

/// Chronological 80/10/10 split; val and test sizes are floor(rows/10), the
/// remainder goes to train.
SplitTable split(const TimeTable& t);

/// One normalized split: row-major feature matrix over the kept columns plus
/// the raw consumption column (kWh, for statistics and reporting).
struct NormalizedTable {
    Matrix features;  // rows x kept-features
    Vector raw_consumption;
    std::vector<CivilTime> timestamps;
    std::vector<int> dst_flags;
};

struct NormalizedSplit {
    NormalizedTable train, val, test;
    std::vector<std::string> kept_names;
};

/// Z-score over all features except dst_flag; constant features are dropped
/// with a warning. When `stats` is given it is reused, otherwise stats are
/// computed from the train part.
NormalizedSplit normalize(const SplitTable& s, NormStats& stats, bool stats_given,
                          PipelineLog* log = nullptr);

/// Sliding windows over one normalized table. Sample i covers rows
/// [i*s, i*s+w) with target = consumption at row i*s+w.
WindowedDataset window(const NormalizedTable& t, std::size_t w, std::size_t s);

/// Timestamps of the targets of `window(t, w, s)`, for forecast output.
std::vector<CivilTime> window_target_times(const NormalizedTable& t, std::size_t w,
                                           std::size_t s);

}  // namespace evf
