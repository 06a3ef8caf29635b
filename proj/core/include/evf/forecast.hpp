#pragma once

#include <optional>
#include <vector>

#include "evf/dataset.hpp"
#include "evf/lstm.hpp"
#include "evf/pipeline.hpp"

namespace evf {

/// One interval forecast: mean +/- k*sigma over N stochastic passes, in kWh.
struct IntervalForecast {
    double mean = 0.0;
    double sigma = 0.0;  // population standard deviation (divide by N)
    double lower = 0.0;
    double upper = 0.0;
    std::size_t n_passes = 0;
    Vector raw_samples;  // kWh; empty unless retention was requested
};

struct PicpReport {
    double multiplier = 1.0;
    double coverage = 0.0;
};

/// Deterministic forward per sample, dropout off, inverse-normalized to kWh.
Vector predict_point(const LstmModel& m, const WindowedDataset& ds,
                     const NormStats& stats);

/// Mean and population sigma over `raw` with bounds mean +/- k*sigma.
IntervalForecast summarize_samples(const Vector& raw, double k, bool keep_raw = false);

/// N stochastic passes per sample with dropout active. Statistics are
/// computed on raw model outputs and inverse-transformed to kWh (the
/// inverse is affine, so mean and bounds commute). With dropout_p == 0 the
/// intervals degenerate to zero width and a warning is recorded.
std::vector<IntervalForecast> predict_interval(const LstmModel& m,
                                               const WindowedDataset& ds,
                                               std::size_t n_passes, double k, Rng& rng,
                                               const NormStats& stats,
                                               PipelineLog* log = nullptr,
                                               bool keep_raw = false);

/// Fraction of actuals inside [mean - k*sigma, mean + k*sigma].
PicpReport picp(const std::vector<IntervalForecast>& forecasts, const Vector& actuals,
                double k);

}  // namespace evf
