#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evf/dataset.hpp"
#include "evf/linalg.hpp"
#include "evf/rng.hpp"

namespace evf {

/// Weights and biases of one LSTM layer. Gate order throughout the module is
/// forget, input, output, candidate.
struct LstmLayerParams {
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
    Matrix W_fx, W_ix, W_ox, W_cx;  // hidden x input
    Matrix W_fh, W_ih, W_oh, W_ch;  // hidden x hidden
    Vector b_f, b_i, b_o, b_c;
};

struct LstmState {
    Vector h;
    Vector c;
};

/// Stacked LSTM with a single-neuron dense head. Dropout masks the output of
/// every layer (including the last hidden vector fed to the head); recurrent
/// connections are never masked.
struct LstmModel {
    std::vector<LstmLayerParams> layers;
    Vector head_weights;
    double head_bias = 0.0;
    double dropout_p = 0.0;
    std::uint64_t rng_seed = 0;
    std::string norm_stats_id;

    std::size_t input_size() const { return layers.empty() ? 0 : layers.front().input_size; }
    std::size_t last_hidden() const { return layers.empty() ? 0 : layers.back().hidden_size; }
};

/// Gradients share the parameter layout.
struct LstmGrads {
    std::vector<LstmLayerParams> layers;
    Vector head_weights;
    double head_bias = 0.0;
};

LstmLayerParams make_layer(std::size_t input_size, std::size_t hidden_size);

/// Uniform init in [-1/sqrt(hidden), 1/sqrt(hidden)], biases zero.
LstmModel make_model(std::size_t input_size, const std::vector<std::size_t>& hidden_sizes,
                     double dropout_p, std::uint64_t seed);

LstmGrads make_grads_like(const LstmModel& m);
void zero_grads(LstmGrads& g);

/// Per-timestep values retained for backpropagation.
struct GateCache {
    Vector x, h_prev, c_prev;
    Vector f, i, o, cbar, c, h;
    Vector mask;  // empty when dropout inactive; entries 0 or 1/(1-p)
    Vector out;   // h (masked when dropout active); what the next layer / head sees
};

struct ForwardCache {
    std::vector<std::vector<GateCache>> steps;  // [layer][t]
    double prediction = 0.0;
};

/// One LSTM cell update. Returns the new state; the cache retains everything
/// backward needs.
LstmState cell_step(const LstmLayerParams& p, const Vector& x, const LstmState& prev,
                    GateCache* cache = nullptr);

/// Inverted-dropout mask: each entry 0 with probability p, else 1/(1-p).
Vector draw_dropout_mask(std::size_t n, double p, Rng& rng);

/// Full pass over one window. States start at zero. A fresh mask is drawn per
/// layer per time step when dropout is active.
double forward_window(const LstmModel& m, const Matrix& window, bool dropout_active,
                      Rng& rng, ForwardCache* cache = nullptr);

/// Same pass with caller-supplied masks (masks[layer][t]); used to replay an
/// exact stochastic forward.
double forward_window_masked(const LstmModel& m, const Matrix& window,
                             const std::vector<std::vector<Vector>>& masks,
                             ForwardCache* cache = nullptr);

/// Exact gradients of the cached forward (dropout masks included) w.r.t.
/// every parameter, accumulated into `acc`.
void backward_window(const LstmModel& m, const ForwardCache& cache, double d_pred,
                     LstmGrads& acc);

struct AdamState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    Vector first_moment;   // sized on first update
    Vector second_moment;
};

/// Flat views over every parameter array, in a fixed order shared by models
/// and gradient holders.
std::vector<std::span<double>> param_spans(LstmModel& m);
std::vector<std::span<double>> param_spans(LstmGrads& g);
std::size_t param_count(const LstmModel& m);

/// Standard Adam with bias correction; increments s.step by one.
void adam_update(LstmModel& m, const LstmGrads& g, AdamState& s);

/// Scales gradients so their global L2 norm is at most max_norm.
void clip_grads(LstmGrads& g, double max_norm);

struct TrainOptions {
    std::size_t batch_size = 32;
    std::size_t epochs = 150;
    bool clip_enabled = true;
    double grad_clip_norm = 5.0;
    int early_stop_patience = 0;  // 0 = off
};

struct TrainReport {
    std::vector<double> epoch_train_loss;
    std::vector<double> epoch_val_loss;
    std::size_t epochs_run = 0;
};

/// MSE over the dataset with dropout off.
double mse_loss(const LstmModel& m, const WindowedDataset& ds);

/// Minimizes MSE with Adam. Windows are reshuffled every epoch from `rng`;
/// dropout is active during training and off for the validation loss.
/// Throws DivergenceError naming the epoch if the loss goes non-finite.
TrainReport train(LstmModel& m, const WindowedDataset& train_set,
                  const WindowedDataset& val_set, const TrainOptions& opt,
                  AdamState& adam, Rng& rng);

/// Versioned binary container; round-trip is bit-exact on all parameters.
void save_model(const LstmModel& m, const std::string& path);
LstmModel load_model(const std::string& path);

}  // namespace evf
