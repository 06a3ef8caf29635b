#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

#include "evf/lstm.hpp"
#include "evf/pipeline.hpp"

namespace evf {

/// Discrete hyperparameter search space. default_grid() is the full
/// production grid; tests and desk-scale runs may restrict the sets.
struct SearchSpace {
    std::vector<std::size_t> batch_sizes{32, 64, 128};
    std::vector<std::size_t> window_sizes{12, 24, 48, 72};
    std::vector<std::size_t> hidden_layers{1, 2, 3};
    std::vector<std::size_t> hidden_neurons{64, 128};
    std::vector<double> learning_rates{1e-4, 1e-3, 1e-2};
    std::vector<double> dropouts{0.0, 0.05, 0.1, 0.15};  // 0 = point-model benchmark

    static SearchSpace default_grid() { return SearchSpace{}; }
    std::size_t size() const {
        return batch_sizes.size() * window_sizes.size() * hidden_layers.size() *
               hidden_neurons.size() * learning_rates.size() * dropouts.size();
    }
};

struct HyperPoint {
    std::size_t batch_size = 32;
    std::size_t window_size = 24;
    std::size_t hidden_layers = 1;
    std::size_t hidden_neurons = 64;
    double learning_rate = 1e-3;
    double dropout_p = 0.1;

    auto operator<=>(const HyperPoint&) const = default;
};

/// All points of the space in lexicographic order (the tie-break order).
std::vector<HyperPoint> enumerate_points(const SearchSpace& space);

struct TrialRecord {
    std::size_t index = 0;
    HyperPoint hp;
    std::uint64_t seed = 0;
    TrainReport train_report;
    double val_mse = 0.0;   // normalized units; the tuning objective
    double val_mape = 0.0;  // percent, kWh space, dropout off
    double wall_time_s = 0.0;
};

/// Trains and scores one hyperparameter point.
using TrialEvaluator = std::function<TrialRecord(const HyperPoint&, std::uint64_t seed)>;

struct TuneResult {
    TrialRecord best;
    std::vector<TrialRecord> all;
    std::vector<std::string> warnings;
};

/// Sequential model-based search: max(8, budget/10) uniform random trials,
/// then a Gaussian-kernel surrogate with expected-improvement acquisition
/// evaluated exhaustively over the remaining points. No point is evaluated
/// twice; ties break lexicographically; fully deterministic per seed.
TuneResult tune(const SearchSpace& space, std::size_t budget,
                const TrialEvaluator& evaluate, std::uint64_t master_seed);

/// Trials sorted by val_mse ascending, ties by lexicographic hyperparameters.
std::vector<TrialRecord> leaderboard(std::vector<TrialRecord> all);

/// The production evaluator: windows the splits at hp.window_size, trains an
/// LSTM for `epochs`, and scores validation MSE / MAPE with dropout off.
TrialEvaluator make_lstm_evaluator(const NormalizedSplit& data, const NormStats& stats,
                                   std::size_t epochs, std::size_t slide = 1,
                                   const TrainOptions* base_options = nullptr);

}  // namespace evf
