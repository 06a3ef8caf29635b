#include "evf/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evf/errors.hpp"

namespace evf {

LstmLayerParams make_layer(std::size_t input_size, std::size_t hidden_size) {
    LstmLayerParams p;
    p.input_size = input_size;
    p.hidden_size = hidden_size;
    p.W_fx = Matrix(hidden_size, input_size);
    p.W_ix = Matrix(hidden_size, input_size);
    p.W_ox = Matrix(hidden_size, input_size);
    p.W_cx = Matrix(hidden_size, input_size);
    p.W_fh = Matrix(hidden_size, hidden_size);
    p.W_ih = Matrix(hidden_size, hidden_size);
    p.W_oh = Matrix(hidden_size, hidden_size);
    p.W_ch = Matrix(hidden_size, hidden_size);
    p.b_f = Vector(hidden_size, 0.0);
    p.b_i = Vector(hidden_size, 0.0);
    p.b_o = Vector(hidden_size, 0.0);
    p.b_c = Vector(hidden_size, 0.0);
    return p;
}

LstmModel make_model(std::size_t input_size, const std::vector<std::size_t>& hidden_sizes,
                     double dropout_p, std::uint64_t seed) {
    if (hidden_sizes.empty()) throw ConfigError("model needs at least one LSTM layer");
    LstmModel m;
    m.dropout_p = dropout_p;
    m.rng_seed = seed;
    Rng rng(seed);
    std::size_t in = input_size;
    for (std::size_t h : hidden_sizes) {
        LstmLayerParams p = make_layer(in, h);
        const double r = 1.0 / std::sqrt(static_cast<double>(h));
        std::uniform_real_distribution<double> u(-r, r);
        for (Matrix* w : {&p.W_fx, &p.W_ix, &p.W_ox, &p.W_cx, &p.W_fh, &p.W_ih, &p.W_oh,
                          &p.W_ch})
            for (double& v : w->data) v = u(rng);
        m.layers.push_back(std::move(p));
        in = h;
    }
    const double r = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-r, r);
    m.head_weights.resize(in);
    for (double& v : m.head_weights) v = u(rng);
    m.head_bias = 0.0;
    return m;
}

LstmGrads make_grads_like(const LstmModel& m) {
    LstmGrads g;
    for (const auto& layer : m.layers)
        g.layers.push_back(make_layer(layer.input_size, layer.hidden_size));
    g.head_weights = Vector(m.head_weights.size(), 0.0);
    g.head_bias = 0.0;
    return g;
}

void zero_grads(LstmGrads& g) {
    for (auto& layer : g.layers) {
        for (Matrix* w : {&layer.W_fx, &layer.W_ix, &layer.W_ox, &layer.W_cx, &layer.W_fh,
                          &layer.W_ih, &layer.W_oh, &layer.W_ch})
            std::fill(w->data.begin(), w->data.end(), 0.0);
        for (Vector* b : {&layer.b_f, &layer.b_i, &layer.b_o, &layer.b_c})
            std::fill(b->begin(), b->end(), 0.0);
    }
    std::fill(g.head_weights.begin(), g.head_weights.end(), 0.0);
    g.head_bias = 0.0;
}

LstmState cell_step(const LstmLayerParams& p, const Vector& x, const LstmState& prev,
                    GateCache* cache) {
    if (x.size() != p.input_size)
        throw DimensionError("cell_step: input length " + std::to_string(x.size()) +
                             " != layer input size " + std::to_string(p.input_size));
    if (prev.h.size() != p.hidden_size || prev.c.size() != p.hidden_size)
        throw DimensionError("cell_step: state size mismatch");

    Vector af = p.b_f, ai = p.b_i, ao = p.b_o, ac = p.b_c;
    matvec_acc(p.W_fx, x, af);
    matvec_acc(p.W_fh, prev.h, af);
    matvec_acc(p.W_ix, x, ai);
    matvec_acc(p.W_ih, prev.h, ai);
    matvec_acc(p.W_ox, x, ao);
    matvec_acc(p.W_oh, prev.h, ao);
    matvec_acc(p.W_cx, x, ac);
    matvec_acc(p.W_ch, prev.h, ac);

    Vector f = sigmoid(af), i = sigmoid(ai), o = sigmoid(ao), cbar = tanh_v(ac);
    Vector c(p.hidden_size);
    for (std::size_t k = 0; k < p.hidden_size; ++k)
        c[k] = f[k] * prev.c[k] + i[k] * cbar[k];
    Vector h(p.hidden_size);
    for (std::size_t k = 0; k < p.hidden_size; ++k) h[k] = o[k] * std::tanh(c[k]);

    if (cache) {
        cache->x = x;
        cache->h_prev = prev.h;
        cache->c_prev = prev.c;
        cache->f = f;
        cache->i = i;
        cache->o = o;
        cache->cbar = cbar;
        cache->c = c;
        cache->h = h;
    }
    return LstmState{std::move(h), std::move(c)};
}

Vector draw_dropout_mask(std::size_t n, double p, Rng& rng) {
    Vector mask(n, 1.0);
    if (p <= 0.0) return mask;
    const double keep = 1.0 - p;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : mask) v = (u(rng) < p) ? 0.0 : 1.0 / keep;
    return mask;
}

namespace {

template <typename MaskFn>
double forward_impl(const LstmModel& m, const Matrix& window, MaskFn&& mask_for,
                    bool masked, ForwardCache* cache) {
    if (m.layers.empty()) throw ConfigError("forward_window: empty model");
    if (window.cols != m.input_size())
        throw DimensionError("forward_window: window has " + std::to_string(window.cols) +
                             " features, model expects " +
                             std::to_string(m.input_size()));
    const std::size_t w = window.rows;
    ForwardCache local;
    ForwardCache& fc = cache ? *cache : local;
    fc.steps.assign(m.layers.size(), std::vector<GateCache>(w));

    std::vector<Vector> layer_in(w);
    for (std::size_t t = 0; t < w; ++t)
        layer_in[t].assign(window.row(t), window.row(t) + window.cols);

    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const LstmLayerParams& p = m.layers[l];
        LstmState st{Vector(p.hidden_size, 0.0), Vector(p.hidden_size, 0.0)};
        for (std::size_t t = 0; t < w; ++t) {
            GateCache& gc = fc.steps[l][t];
            st = cell_step(p, layer_in[t], st, &gc);
            if (masked) {
                gc.mask = mask_for(l, t, p.hidden_size);
                gc.out = hadamard(gc.h, gc.mask);
            } else {
                gc.out = gc.h;
            }
            layer_in[t] = gc.out;
        }
    }

    const Vector& final_out = fc.steps.back()[w - 1].out;
    double pred = dot(final_out, m.head_weights) + m.head_bias;
    if (!std::isfinite(pred))
        throw DivergenceError("forward_window: non-finite prediction", -1);
    fc.prediction = pred;
    return pred;
}

}  // namespace

double forward_window(const LstmModel& m, const Matrix& window, bool dropout_active,
                      Rng& rng, ForwardCache* cache) {
    const bool masked = dropout_active && m.dropout_p > 0.0;
    return forward_impl(
        m, window,
        [&](std::size_t, std::size_t, std::size_t n) {
            return draw_dropout_mask(n, m.dropout_p, rng);
        },
        masked, cache);
}

double forward_window_masked(const LstmModel& m, const Matrix& window,
                             const std::vector<std::vector<Vector>>& masks,
                             ForwardCache* cache) {
    return forward_impl(
        m, window,
        [&](std::size_t l, std::size_t t, std::size_t) { return masks[l][t]; }, true,
        cache);
}

void backward_window(const LstmModel& m, const ForwardCache& cache, double d_pred,
                     LstmGrads& acc) {
    if (cache.steps.size() != m.layers.size() || acc.layers.size() != m.layers.size())
        throw DimensionError("backward_window: cache/model mismatch");
    const std::size_t L = m.layers.size();
    const std::size_t w = cache.steps[0].size();
    if (w == 0) throw DimensionError("backward_window: empty cache");

    // Gradient flowing into each layer's (masked) output per time step.
    std::vector<std::vector<Vector>> d_out(L);
    for (std::size_t l = 0; l < L; ++l)
        d_out[l].assign(w, Vector(m.layers[l].hidden_size, 0.0));

    const GateCache& top_last = cache.steps[L - 1][w - 1];
    if (top_last.out.size() != m.head_weights.size())
        throw DimensionError("backward_window: cache/model mismatch at head");

    for (std::size_t k = 0; k < m.head_weights.size(); ++k) {
        acc.head_weights[k] += d_pred * top_last.out[k];
        d_out[L - 1][w - 1][k] += d_pred * m.head_weights[k];
    }
    acc.head_bias += d_pred;

    for (std::size_t li = L; li-- > 0;) {
        const LstmLayerParams& p = m.layers[li];
        LstmLayerParams& g = acc.layers[li];
        const std::size_t H = p.hidden_size;
        Vector dh_next(H, 0.0), dc_next(H, 0.0);
        Vector da_f(H), da_i(H), da_o(H), da_c(H), dh(H), dc(H);
        for (std::size_t t = w; t-- > 0;) {
            const GateCache& gc = cache.steps[li][t];
            for (std::size_t k = 0; k < H; ++k) {
                double d = dh_next[k];
                // The mask applies only to the branch that leaves the layer.
                d += gc.mask.empty() ? d_out[li][t][k] : d_out[li][t][k] * gc.mask[k];
                dh[k] = d;
                const double tc = std::tanh(gc.c[k]);
                dc[k] = dc_next[k] + d * gc.o[k] * (1.0 - tc * tc);
                da_o[k] = d * tc * gc.o[k] * (1.0 - gc.o[k]);
                da_f[k] = dc[k] * gc.c_prev[k] * gc.f[k] * (1.0 - gc.f[k]);
                da_i[k] = dc[k] * gc.cbar[k] * gc.i[k] * (1.0 - gc.i[k]);
                da_c[k] = dc[k] * gc.i[k] * (1.0 - gc.cbar[k] * gc.cbar[k]);
            }
            add_outer(g.W_fx, da_f, gc.x);
            add_outer(g.W_ix, da_i, gc.x);
            add_outer(g.W_ox, da_o, gc.x);
            add_outer(g.W_cx, da_c, gc.x);
            add_outer(g.W_fh, da_f, gc.h_prev);
            add_outer(g.W_ih, da_i, gc.h_prev);
            add_outer(g.W_oh, da_o, gc.h_prev);
            add_outer(g.W_ch, da_c, gc.h_prev);
            for (std::size_t k = 0; k < H; ++k) {
                g.b_f[k] += da_f[k];
                g.b_i[k] += da_i[k];
                g.b_o[k] += da_o[k];
                g.b_c[k] += da_c[k];
            }
            if (li > 0) {
                Vector& dx = d_out[li - 1][t];
                matvec_t_acc(p.W_fx, da_f, dx);
                matvec_t_acc(p.W_ix, da_i, dx);
                matvec_t_acc(p.W_ox, da_o, dx);
                matvec_t_acc(p.W_cx, da_c, dx);
            }
            std::fill(dh_next.begin(), dh_next.end(), 0.0);
            matvec_t_acc(p.W_fh, da_f, dh_next);
            matvec_t_acc(p.W_ih, da_i, dh_next);
            matvec_t_acc(p.W_oh, da_o, dh_next);
            matvec_t_acc(p.W_ch, da_c, dh_next);
            for (std::size_t k = 0; k < H; ++k) dc_next[k] = dc[k] * gc.f[k];
        }
    }
}

std::vector<std::span<double>> param_spans(LstmModel& m) {
    std::vector<std::span<double>> spans;
    for (auto& p : m.layers) {
        for (Matrix* w : {&p.W_fx, &p.W_ix, &p.W_ox, &p.W_cx, &p.W_fh, &p.W_ih, &p.W_oh,
                          &p.W_ch})
            spans.emplace_back(w->data);
        for (Vector* b : {&p.b_f, &p.b_i, &p.b_o, &p.b_c}) spans.emplace_back(*b);
    }
    spans.emplace_back(m.head_weights);
    spans.emplace_back(&m.head_bias, 1);
    return spans;
}

std::vector<std::span<double>> param_spans(LstmGrads& g) {
    std::vector<std::span<double>> spans;
    for (auto& p : g.layers) {
        for (Matrix* w : {&p.W_fx, &p.W_ix, &p.W_ox, &p.W_cx, &p.W_fh, &p.W_ih, &p.W_oh,
                          &p.W_ch})
            spans.emplace_back(w->data);
        for (Vector* b : {&p.b_f, &p.b_i, &p.b_o, &p.b_c}) spans.emplace_back(*b);
    }
    spans.emplace_back(g.head_weights);
    spans.emplace_back(&g.head_bias, 1);
    return spans;
}

std::size_t param_count(const LstmModel& m) {
    std::size_t n = 0;
    for (const auto& p : m.layers)
        n += 4 * p.hidden_size * p.input_size + 4 * p.hidden_size * p.hidden_size +
             4 * p.hidden_size;
    return n + m.head_weights.size() + 1;
}

void adam_update(LstmModel& m, const LstmGrads& g, AdamState& s) {
    const std::size_t n = param_count(m);
    if (s.first_moment.empty()) {
        s.first_moment.assign(n, 0.0);
        s.second_moment.assign(n, 0.0);
    }
    if (s.first_moment.size() != n)
        throw DimensionError("adam_update: state sized for a different model");

    auto ps = param_spans(m);
    auto gs = param_spans(const_cast<LstmGrads&>(g));
    s.step += 1;
    const double b1t = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
    const double b2t = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
    std::size_t off = 0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
        auto pp = ps[k];
        auto gg = gs[k];
        for (std::size_t j = 0; j < pp.size(); ++j, ++off) {
            const double grad = gg[j];
            double& m1 = s.first_moment[off];
            double& m2 = s.second_moment[off];
            m1 = s.beta1 * m1 + (1.0 - s.beta1) * grad;
            m2 = s.beta2 * m2 + (1.0 - s.beta2) * grad * grad;
            pp[j] -= s.learning_rate * (m1 / b1t) / (std::sqrt(m2 / b2t) + s.epsilon);
        }
    }
}

void clip_grads(LstmGrads& g, double max_norm) {
    auto gs = param_spans(g);
    double sq = 0.0;
    for (auto& s : gs)
        for (double v : s) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    const double scale = max_norm / norm;
    for (auto& s : gs)
        for (double& v : s) v *= scale;
}

double mse_loss(const LstmModel& m, const WindowedDataset& ds) {
    if (ds.size() == 0) throw DataError("mse_loss: empty dataset");
    Rng unused(0);
    double acc = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double e = forward_window(m, ds.inputs[i], false, unused) - ds.targets[i];
        acc += e * e;
    }
    return acc / static_cast<double>(ds.size());
}

TrainReport train(LstmModel& m, const WindowedDataset& train_set,
                  const WindowedDataset& val_set, const TrainOptions& opt,
                  AdamState& adam, Rng& rng) {
    if (train_set.size() == 0) throw DataError("train: empty training set");
    TrainReport report;
    LstmGrads grads = make_grads_like(m);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_sq = 0.0;
        for (std::size_t b = 0; b < order.size(); b += opt.batch_size) {
            const std::size_t bend = std::min(b + opt.batch_size, order.size());
            const double inv_b = 1.0 / static_cast<double>(bend - b);
            zero_grads(grads);
            for (std::size_t k = b; k < bend; ++k) {
                const std::size_t idx = order[k];
                ForwardCache cache;
                double pred;
                try {
                    pred = forward_window(m, train_set.inputs[idx], true, rng, &cache);
                } catch (const DivergenceError&) {
                    throw DivergenceError("train: non-finite activation at epoch " +
                                              std::to_string(epoch),
                                          static_cast<int>(epoch));
                }
                const double err = pred - train_set.targets[idx];
                epoch_sq += err * err;
                backward_window(m, cache, 2.0 * err * inv_b, grads);
            }
            if (opt.clip_enabled) clip_grads(grads, opt.grad_clip_norm);
            adam_update(m, grads, adam);
        }
        const double train_loss = epoch_sq / static_cast<double>(order.size());
        if (!std::isfinite(train_loss))
            throw DivergenceError("train: loss diverged at epoch " + std::to_string(epoch),
                                  static_cast<int>(epoch));
        const double val_loss = val_set.size() ? mse_loss(m, val_set) : train_loss;
        report.epoch_train_loss.push_back(train_loss);
        report.epoch_val_loss.push_back(val_loss);
        report.epochs_run = epoch + 1;

        if (opt.early_stop_patience > 0) {
            if (val_loss < best_val) {
                best_val = val_loss;
                since_best = 0;
            } else if (++since_best >= opt.early_stop_patience) {
                break;
            }
        }
    }
    return report;
}

}  // namespace evf
