#include "evf/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "evf/errors.hpp"
#include "evf/rng.hpp"

namespace evf {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::int64_t resolve_start(const CivilTime& wall, const DstRule& rule) {
    const ResolvedWall r = resolve_wall(wall, rule);
    switch (r.kind) {
        case WallKind::Unique:
            return r.dst ? r.std_hours_dst : r.std_hours_std;
        case WallKind::Ambiguous:
            return r.std_hours_dst;  // first occurrence
        case WallKind::Nonexistent:
            throw ConfigError("synthgen: start/end falls in the spring-forward gap: " +
                              format_civil(wall));
    }
    return 0;
}

// Deterministic ambient temperature (degC) on the standard-time axis.
double true_temperature(std::int64_t std_hour) {
    const CivilTime t = civil_from_hours(std_hour);
    const double doy = static_cast<double>(day_of_year(t));
    const double seasonal = 8.0 - 14.0 * std::cos(2.0 * kPi * (doy - 15.0) / 365.25);
    const double diurnal = 4.0 * std::sin(2.0 * kPi * (t.hour - 9.0) / 24.0);
    return seasonal + diurnal;
}

}  // namespace

SynthOutput generate(const SynthConfig& cfg) {
    if (cfg.base_load_kw < 0 || cfg.ev_charger_kw < 0 || cfg.noise_std_kw < 0 ||
        cfg.ev_sessions_per_week < 0 || cfg.missing_temp_rate < 0 ||
        cfg.missing_temp_rate > 1)
        throw ConfigError("synthgen: rates must be non-negative");
    const std::int64_t t0 = resolve_start(cfg.start, cfg.dst_rule);
    const std::int64_t t1 = resolve_start(cfg.end, cfg.dst_rule);
    if (t1 <= t0) throw ConfigError("synthgen: end must be after start");
    const std::size_t n = static_cast<std::size_t>(t1 - t0 + 1);

    std::vector<double> plug_weights = cfg.ev_plug_in_hour_distribution;
    if (plug_weights.empty()) {
        plug_weights.assign(24, 0.2);
        for (int h : {17, 18, 19, 20, 21, 22}) plug_weights[h] = 2.0;
    }
    if (plug_weights.size() != 24)
        throw ConfigError("synthgen: plug-in hour distribution needs 24 weights");

    // Independent streams so changing one knob does not reshuffle the others.
    Rng temp_rng(cfg.seed ^ 0x74656d70u);
    Rng ev_rng(cfg.seed ^ 0x65766c64u);
    Rng noise_rng(cfg.seed ^ 0x6e6f6973u);
    Rng miss_rng(cfg.seed ^ 0x6d697373u);

    // EV charging schedule on the real-hour axis.
    std::vector<char> ev_active(n, 0);
    std::size_t n_sessions = 0;
    {
        std::poisson_distribution<int> arrivals(cfg.ev_sessions_per_week / 7.0);
        std::discrete_distribution<int> plug_hour(plug_weights.begin(), plug_weights.end());
        std::uniform_int_distribution<int> duration(2, 5);
        const std::size_t n_days = (n + 23) / 24;
        for (std::size_t d = 0; d < n_days; ++d) {
            int k = cfg.ev_sessions_per_week > 0 ? arrivals(ev_rng) : 0;
            for (int s = 0; s < k; ++s) {
                const std::size_t begin = d * 24 + static_cast<std::size_t>(plug_hour(ev_rng));
                const int dur = duration(ev_rng);
                if (begin >= n) continue;
                ++n_sessions;
                for (std::size_t h = begin; h < std::min(begin + dur, n); ++h)
                    ev_active[h] = 1;
            }
        }
    }

    SynthOutput out;
    out.household.household_id = "synth-" + std::to_string(cfg.seed);
    out.household.readings.reserve(n);
    out.stations.resize(2);
    out.stations[0].station_id = "station-a";
    out.stations[1].station_id = "station-b";
    for (auto& st : out.stations) st.readings.reserve(n);
    out.ev_active.assign(n, 0);
    out.n_sessions = n_sessions;

    std::normal_distribution<double> station_noise(0.0, 0.7);
    std::normal_distribution<double> load_noise(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double station_offset[2] = {0.0, 0.8};

    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t std_hour = t0 + static_cast<std::int64_t>(i);
        const CivilTime wall = wall_from_std(std_hour, cfg.dst_rule);
        const double temp = true_temperature(std_hour);

        for (int s = 0; s < 2; ++s) {
            WeatherReading r;
            r.timestamp = wall;
            r.temperature_c = temp + station_offset[s] + station_noise(temp_rng);
            out.stations[s].readings.push_back(r);
        }

        const CivilTime local = wall;
        const double daily = std::sin(2.0 * kPi * (local.hour - 18.0) / 24.0);
        const double weekly = std::sin(2.0 * kPi * day_of_week(local) / 7.0);
        // Occupancy shape stays within [0.3, 1.0] * base so the zero-EV bound
        // base + HVAC + 4*noise_std holds by construction.
        double kw = cfg.base_load_kw * (0.65 + 0.25 * daily + 0.10 * weekly);
        kw += cfg.hvac_gain_kw_per_degc * std::abs(temp - 18.0);
        if (ev_active[i]) {
            kw += cfg.ev_charger_kw;
            out.ev_active[i] = 1;
        }
        kw += cfg.noise_std_kw * load_noise(noise_rng);
        if (kw < 0.0) kw = 0.0;
        out.household.readings.push_back(HouseholdReading{wall, kw});
    }

    if (cfg.missing_temp_rate > 0.0) {
        for (auto& st : out.stations) {
            for (std::size_t i = 0; i < st.readings.size(); ++i) {
                if (u01(miss_rng) < cfg.missing_temp_rate)
                    st.readings[i].temperature_c.reset();
            }
        }
    }
    return out;
}

}  // namespace evf
