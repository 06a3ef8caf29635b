#include "evf/forecast.hpp"

#include <cmath>

#include "evf/errors.hpp"

namespace evf {

Vector predict_point(const LstmModel& m, const WindowedDataset& ds,
                     const NormStats& stats) {
    Rng unused(0);
    Vector out;
    out.reserve(ds.size());
    for (const auto& in : ds.inputs)
        out.push_back(stats.inverse_consumption(forward_window(m, in, false, unused)));
    return out;
}

IntervalForecast summarize_samples(const Vector& raw, double k, bool keep_raw) {
    if (raw.size() < 2)
        throw ConfigError("interval summary needs at least 2 samples");
    IntervalForecast f;
    f.n_passes = raw.size();
    const double n = static_cast<double>(raw.size());
    // Identical samples (dropout 0) must yield an exactly degenerate interval;
    // the general path would pick up rounding noise from the mean.
    bool all_equal = true;
    for (double v : raw)
        if (v != raw.front()) { all_equal = false; break; }
    if (all_equal) {
        f.mean = raw.front();
        f.sigma = 0.0;
        f.lower = f.upper = f.mean;
        if (keep_raw) f.raw_samples = raw;
        return f;
    }
    double mean = 0.0;
    for (double v : raw) mean += v;
    mean /= n;
    double sq = 0.0;
    for (double v : raw) sq += (v - mean) * (v - mean);
    f.mean = mean;
    f.sigma = std::sqrt(sq / n);
    f.lower = mean - k * f.sigma;
    f.upper = mean + k * f.sigma;
    if (keep_raw) f.raw_samples = raw;
    return f;
}

std::vector<IntervalForecast> predict_interval(const LstmModel& m,
                                               const WindowedDataset& ds,
                                               std::size_t n_passes, double k, Rng& rng,
                                               const NormStats& stats,
                                               PipelineLog* log, bool keep_raw) {
    if (n_passes < 2) throw ConfigError("predict_interval: n_passes must be >= 2");
    if (m.dropout_p <= 0.0 && log)
        log->warn("predict_interval: model has dropout 0, intervals are zero-width");

    std::vector<IntervalForecast> out;
    out.reserve(ds.size());
    Vector raw(n_passes);
    for (const auto& in : ds.inputs) {
        // Fixed pass order keeps the summation bitwise deterministic.
        for (std::size_t p = 0; p < n_passes; ++p)
            raw[p] = stats.inverse_consumption(forward_window(m, in, true, rng));
        out.push_back(summarize_samples(raw, k, keep_raw));
    }
    return out;
}

PicpReport picp(const std::vector<IntervalForecast>& forecasts, const Vector& actuals,
                double k) {
    if (forecasts.size() != actuals.size())
        throw DimensionError("picp: " + std::to_string(forecasts.size()) +
                             " forecasts vs " + std::to_string(actuals.size()) +
                             " actuals");
    if (forecasts.empty()) throw DataError("picp: empty input");
    std::size_t inside = 0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const double lo = forecasts[i].mean - k * forecasts[i].sigma;
        const double hi = forecasts[i].mean + k * forecasts[i].sigma;
        if (actuals[i] >= lo && actuals[i] <= hi) ++inside;
    }
    PicpReport r;
    r.multiplier = k;
    r.coverage = static_cast<double>(inside) / static_cast<double>(forecasts.size());
    return r;
}

}  // namespace evf
