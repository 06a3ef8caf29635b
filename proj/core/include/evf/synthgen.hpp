#pragma once

#include <cstdint>

#include "evf/pipeline.hpp"

namespace evf {

/// Deterministic synthetic EV-household generator used for tests and
/// desk-scale runs in place of NDA-protected smart-meter data.
struct SynthConfig {
    std::uint64_t seed = 42;
    CivilTime start{2018, 7, 22, 0};
    CivilTime end{2020, 7, 21, 0};  // inclusive
    double base_load_kw = 0.6;
    double hvac_gain_kw_per_degc = 0.05;
    double ev_charger_kw = 7.2;
    double ev_sessions_per_week = 3.0;
    std::vector<double> ev_plug_in_hour_distribution;  // 24 weights; default evening peak
    double noise_std_kw = 0.15;
    double missing_temp_rate = 0.0;
    DstRule dst_rule;
};

struct SynthOutput {
    HouseholdSeries household;
    std::vector<WeatherSeries> stations;  // two stations with offset noise
    std::vector<char> ev_active;          // per emitted row: inside a charging block
    std::size_t n_sessions = 0;
};

/// Temperature: seasonal + diurnal sinusoids + noise. Consumption: base +
/// daily/weekly sinusoid + HVAC term proportional to |T - 18| + EV charging
/// blocks (2-5 h at ev_charger_kw) + clipped Gaussian noise. Fully
/// reproducible from the seed. Timestamps are local wall-clock, so fall-back
/// hours appear twice and spring-forward hours are absent.
SynthOutput generate(const SynthConfig& cfg);

}  // namespace evf
