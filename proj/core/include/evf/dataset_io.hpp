#pragma once

#include <string>
#include <vector>

#include "evf/forecast.hpp"
#include "evf/hyperopt.hpp"
#include "evf/pipeline.hpp"

namespace evf {

// Household CSV: header "interval_start,consumption_kwh", ISO-8601 local
// timestamps, one row per hour.
void write_household_csv(const std::string& path, const HouseholdSeries& h);
HouseholdSeries read_household_csv(const std::string& path);

// Weather CSV: header "station_id,timestamp,temperature_c"; an empty
// temperature field means missing. A file may carry several stations.
void write_weather_csv(const std::string& path, const std::vector<WeatherSeries>& all);
std::vector<WeatherSeries> read_weather_csv(const std::string& path);

/// Everything downstream commands need without re-running preparation.
struct PreparedDataset {
    NormStats stats;
    NormalizedSplit splits;
    std::size_t window = 24;
    std::size_t slide = 1;
    std::vector<std::string> warnings;
};

void save_prepared(const std::string& path, const PreparedDataset& d);
PreparedDataset load_prepared(const std::string& path);

/// Forecast output: one record per timestep plus a metadata sidecar written
/// by the CLI.
struct ForecastRow {
    CivilTime timestamp;
    double actual = 0.0;
    bool has_actual = false;
    double point = 0.0;
    double mean = 0.0;
    double sigma = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

void write_forecast_csv(const std::string& path, const std::vector<ForecastRow>& rows);

/// Append-only trial log, one JSON record per line; enough to resume a
/// search.
void append_trial_log(const std::string& path, const TrialRecord& rec);
std::vector<TrialRecord> read_trial_log(const std::string& path);

/// FNV-1a over a file's bytes, as a hex string (model/report fingerprints).
std::string file_hash_hex(const std::string& path);
std::string string_hash_hex(const std::string& data);

}  // namespace evf
