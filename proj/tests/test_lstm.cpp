#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "evf/lstm.hpp"
#include "evf/pipeline.hpp"

using namespace evf;

namespace {

// All weights set to `w`, biases to `b` — handy for hand-checked cases.
LstmModel constant_model(std::size_t input, std::size_t hidden, double w, double b) {
    LstmModel m = make_model(input, {hidden}, 0.0, 1);
    for (auto span : param_spans(m))
        for (double& v : span) v = w;
    for (auto* bias : {&m.layers[0].b_f, &m.layers[0].b_i, &m.layers[0].b_o,
                       &m.layers[0].b_c})
        for (double& v : *bias) v = b;
    return m;
}

WindowedDataset sine_dataset(std::size_t rows, std::size_t w) {
    // One feature: a 24-hour sine; target is the next value.
    NormalizedTable t;
    t.features = Matrix(rows, 1);
    for (std::size_t i = 0; i < rows; ++i)
        t.features(i, 0) = std::sin(2.0 * 3.14159265358979323846 *
                                    static_cast<double>(i) / 24.0);
    t.raw_consumption.assign(rows, 0.0);
    return window(t, w, 1);
}

double fd_gradient(LstmModel& m, const Matrix& win, double* param, double eps = 1e-6) {
    const double orig = *param;
    Rng rng(0);
    *param = orig + eps;
    const double up = forward_window(m, win, false, rng);
    *param = orig - eps;
    const double dn = forward_window(m, win, false, rng);
    *param = orig;
    return (up - dn) / (2.0 * eps);
}

}  // namespace

TEST_CASE("cell_step matches the scalar hand computation") {
    // 1-d cell, every weight 1, bias 0, x = 1, zero state:
    // f = i = o = sigmoid(1), cbar = tanh(1), c = i*cbar, h = o*tanh(c).
    const LstmModel m = constant_model(1, 1, 1.0, 0.0);
    LstmState s{Vector{0.0}, Vector{0.0}};
    const LstmState next = cell_step(m.layers[0], Vector{1.0}, s);
    const double sig1 = 1.0 / (1.0 + std::exp(-1.0));
    CHECK(next.c[0] == doctest::Approx(sig1 * std::tanh(1.0)).epsilon(1e-12));
    CHECK(next.c[0] == doctest::Approx(0.55677).epsilon(1e-4));
    CHECK(next.h[0] == doctest::Approx(sig1 * std::tanh(sig1 * std::tanh(1.0))).epsilon(1e-12));
    CHECK(next.h[0] == doctest::Approx(0.36953).epsilon(1e-4));
}

TEST_CASE("cell_step with zero parameters halves the candidate path") {
    // All gates sigmoid(0) = 0.5, cbar = tanh(0) = 0 -> c = h = 0.
    const LstmModel m = constant_model(2, 3, 0.0, 0.0);
    LstmState s{Vector(3, 0.0), Vector(3, 0.0)};
    GateCache gc;
    const LstmState next = cell_step(m.layers[0], Vector{1.0, -1.0}, s, &gc);
    for (double v : gc.f) CHECK(v == doctest::Approx(0.5));
    for (double v : next.c) CHECK(v == 0.0);
    for (double v : next.h) CHECK(v == 0.0);
}

TEST_CASE("saturated forget gate preserves cell state") {
    LstmModel m = constant_model(1, 1, 0.0, 0.0);
    m.layers[0].b_f[0] = 50.0;   // forget ~ 1
    m.layers[0].b_i[0] = -50.0;  // input ~ 0
    LstmState s{Vector{0.0}, Vector{0.7}};
    const LstmState next = cell_step(m.layers[0], Vector{1.0}, s);
    CHECK(next.c[0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("gate activations stay inside their ranges") {
    Rng rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    LstmModel m = make_model(4, {5, 5}, 0.0, 11);
    Matrix win(6, 4);
    for (double& v : win.data) v = u(rng);
    ForwardCache cache;
    forward_window(m, win, false, rng, &cache);
    for (const auto& layer_steps : cache.steps)
        for (const GateCache& gc : layer_steps) {
            for (double v : gc.f) { CHECK(v > 0.0); CHECK(v < 1.0); }
            for (double v : gc.i) { CHECK(v > 0.0); CHECK(v < 1.0); }
            for (double v : gc.o) { CHECK(v > 0.0); CHECK(v < 1.0); }
            for (double v : gc.cbar) { CHECK(v > -1.0); CHECK(v < 1.0); }
        }
}

TEST_CASE("forward is deterministic without dropout, stochastic with it") {
    LstmModel m = make_model(3, {8}, 0.3, 5);
    Rng rng(123);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix win(10, 3);
    for (double& v : win.data) v = u(rng);

    Rng a(1), b(1);
    CHECK(forward_window(m, win, false, a) == forward_window(m, win, false, b));

    std::size_t distinct = 0;
    Rng c(2);
    for (int rep = 0; rep < 100; ++rep) {
        const double p1 = forward_window(m, win, true, c);
        const double p2 = forward_window(m, win, true, c);
        if (p1 != p2) ++distinct;
    }
    CHECK(distinct >= 95);
}

TEST_CASE("dropout masks are inverted and unbiased") {
    const double p = 0.25;
    Rng rng(99);
    double sum = 0.0;
    std::size_t n = 0, zeros = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const Vector mask = draw_dropout_mask(10, p, rng);
        for (double v : mask) {
            CHECK((v == 0.0 || v == doctest::Approx(1.0 / (1.0 - p))));
            if (v == 0.0) ++zeros;
            sum += v;
            ++n;
        }
    }
    // Mean of an inverted mask is 1; SE = sqrt(p/(1-p))/sqrt(n).
    const double se = std::sqrt(p / (1.0 - p)) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum / static_cast<double>(n) - 1.0) < 3.0 * se);
    const double zr = static_cast<double>(zeros) / static_cast<double>(n);
    CHECK(std::abs(zr - p) < 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)));
}

TEST_CASE("backward matches finite differences on every parameter") {
    Rng rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LstmModel m = make_model(2, {3, 3}, 0.0, 17);
    Matrix win(4, 2);
    for (double& v : win.data) v = u(rng);

    ForwardCache cache;
    Rng fwd(0);
    forward_window(m, win, false, fwd, &cache);
    LstmGrads g = make_grads_like(m);
    zero_grads(g);
    backward_window(m, cache, 1.0, g);

    auto mp = param_spans(m);
    auto gp = param_spans(g);
    REQUIRE(mp.size() == gp.size());
    for (std::size_t s = 0; s < mp.size(); ++s)
        for (std::size_t k = 0; k < mp[s].size(); ++k) {
            const double fd = fd_gradient(m, win, &mp[s][k]);
            CHECK(gp[s][k] == doctest::Approx(fd).epsilon(1e-5));
        }
}

TEST_CASE("backward handles a replayed dropout mask exactly") {
    Rng rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LstmModel m = make_model(2, {3}, 0.5, 3);
    Matrix win(3, 2);
    for (double& v : win.data) v = u(rng);

    // Freeze one stochastic mask set, then replay it for FD.
    std::vector<std::vector<Vector>> masks(1);
    Rng mask_rng(77);
    for (std::size_t t = 0; t < 3; ++t)
        masks[0].push_back(draw_dropout_mask(3, 0.5, mask_rng));

    ForwardCache cache;
    forward_window_masked(m, win, masks, &cache);
    LstmGrads g = make_grads_like(m);
    zero_grads(g);
    backward_window(m, cache, 1.0, g);

    auto mp = param_spans(m);
    auto gp = param_spans(g);
    const double eps = 1e-6;
    for (std::size_t s = 0; s < mp.size(); ++s)
        for (std::size_t k = 0; k < mp[s].size(); ++k) {
            const double orig = mp[s][k];
            mp[s][k] = orig + eps;
            const double up = forward_window_masked(m, win, masks);
            mp[s][k] = orig - eps;
            const double dn = forward_window_masked(m, win, masks);
            mp[s][k] = orig;
            const double fd = (up - dn) / (2.0 * eps);
            CHECK(gp[s][k] == doctest::Approx(fd).epsilon(1e-5));
        }
}

TEST_CASE("adam first step moves by about the learning rate") {
    LstmModel m = constant_model(1, 1, 0.5, 0.0);
    LstmGrads g = make_grads_like(m);
    zero_grads(g);
    for (auto span : param_spans(g))
        for (double& v : span) v = 1.0;  // unit gradient everywhere
    AdamState s;
    s.learning_rate = 0.01;
    const double before = m.layers[0].W_fx(0, 0);
    adam_update(m, g, s);
    // With bias correction, step 1 moves by lr * g/(|g| + eps') ~ lr.
    CHECK(m.layers[0].W_fx(0, 0) == doctest::Approx(before - 0.01).epsilon(1e-5));
    CHECK(s.step == 1);
}

TEST_CASE("adam leaves parameters alone on zero gradients") {
    LstmModel m = make_model(2, {3}, 0.0, 9);
    LstmModel copy = m;
    LstmGrads g = make_grads_like(m);
    zero_grads(g);
    AdamState s;
    adam_update(m, g, s);
    auto a = param_spans(m);
    auto b = param_spans(copy);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < a[i].size(); ++k)
            CHECK(a[i][k] == b[i][k]);
}

TEST_CASE("clip_grads caps the global norm and is a no-op below it") {
    LstmModel m = constant_model(1, 1, 0.0, 0.0);
    LstmGrads g = make_grads_like(m);
    zero_grads(g);
    auto gp = param_spans(g);
    gp[0][0] = 30.0;
    gp[1][0] = 40.0;  // global norm 50
    clip_grads(g, 5.0);
    CHECK(gp[0][0] == doctest::Approx(3.0));
    CHECK(gp[1][0] == doctest::Approx(4.0));
    clip_grads(g, 100.0);
    CHECK(gp[0][0] == doctest::Approx(3.0));
}

TEST_CASE("model save/load round-trips bit-exactly") {
    const std::string path = (std::filesystem::temp_directory_path() /
                              "evf_test_model.bin").string();
    LstmModel m = make_model(5, {7, 4}, 0.1, 12345);
    m.norm_stats_id = "abc123";
    save_model(m, path);
    LstmModel r = load_model(path);
    CHECK(r.dropout_p == m.dropout_p);
    CHECK(r.rng_seed == m.rng_seed);
    CHECK(r.norm_stats_id == m.norm_stats_id);
    auto a = param_spans(m);
    auto b = param_spans(r);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].size() == b[i].size());
        for (std::size_t k = 0; k < a[i].size(); ++k)
            CHECK(std::memcmp(&a[i][k], &b[i][k], sizeof(double)) == 0);
    }
    // Predictions identical on 100 random windows.
    Rng rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 100; ++rep) {
        Matrix win(6, 5);
        for (double& v : win.data) v = u(rng);
        Rng z(0);
        CHECK(forward_window(m, win, false, z) == forward_window(r, win, false, z));
    }
    std::filesystem::remove(path);
}

TEST_CASE("model loader rejects truncated and wrong-version files") {
    namespace fs = std::filesystem;
    const std::string path = (fs::temp_directory_path() / "evf_bad_model.bin").string();
    LstmModel m = make_model(2, {3}, 0.0, 1);
    save_model(m, path);

    // Truncate.
    const auto size = fs::file_size(path);
    fs::resize_file(path, size / 2);
    CHECK_THROWS_AS(load_model(path), IoError);

    // Wrong magic.
    { std::ofstream os(path, std::ios::binary | std::ios::trunc); os << "NOTMODEL"; }
    CHECK_THROWS_AS(load_model(path), IoError);

    // Wrong version.
    save_model(m, path);
    {
        std::fstream fsr(path, std::ios::binary | std::ios::in | std::ios::out);
        fsr.seekp(8);
        std::uint32_t v = 999;
        fsr.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    CHECK_THROWS_AS(load_model(path), IoError);
    fs::remove(path);
}

TEST_CASE("train with zero epochs changes nothing") {
    const WindowedDataset ds = sine_dataset(60, 8);
    LstmModel m = make_model(1, {4}, 0.0, 2);
    const LstmModel copy = m;
    AdamState adam;
    TrainOptions opt;
    opt.epochs = 0;
    Rng rng(1);
    const TrainReport rep = train(m, ds, ds, opt, adam, rng);
    CHECK(rep.epochs_run == 0);
    auto a = param_spans(m);
    LstmModel c2 = copy;
    auto b = param_spans(c2);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < a[i].size(); ++k)
            CHECK(a[i][k] == b[i][k]);
}

TEST_CASE("training a sine forecaster reduces the loss substantially") {
    const WindowedDataset train_ds = sine_dataset(240, 12);
    const WindowedDataset val_ds = sine_dataset(72, 12);
    LstmModel m = make_model(1, {8}, 0.0, 42);
    AdamState adam;
    adam.learning_rate = 1e-2;
    TrainOptions opt;
    opt.epochs = 30;
    Rng rng(42);
    const double before = mse_loss(m, train_ds);
    const TrainReport rep = train(m, train_ds, val_ds, opt, adam, rng);
    const double after = mse_loss(m, train_ds);
    CHECK(rep.epochs_run == 30);
    CHECK(rep.epoch_train_loss.size() == 30);
    CHECK(rep.epoch_val_loss.size() == 30);
    CHECK(after < before * 0.1);
    CHECK(rep.epoch_val_loss.back() < rep.epoch_val_loss.front());
}

TEST_CASE("training runs are reproducible from the seed") {
    const WindowedDataset ds = sine_dataset(120, 8);
    auto run = [&ds]() {
        LstmModel m = make_model(1, {6}, 0.1, 7);
        AdamState adam;
        TrainOptions opt;
        opt.epochs = 5;
        Rng rng(7);
        train(m, ds, ds, opt, adam, rng);
        Rng z(0);
        return forward_window(m, ds.inputs[0], false, z);
    };
    CHECK(run() == run());
}

TEST_CASE("early stopping halts on a plateau") {
    const WindowedDataset ds = sine_dataset(120, 8);
    LstmModel m = make_model(1, {4}, 0.0, 3);
    AdamState adam;
    adam.learning_rate = 0.0;  // no progress possible
    TrainOptions opt;
    opt.epochs = 50;
    opt.early_stop_patience = 3;
    Rng rng(3);
    const TrainReport rep = train(m, ds, ds, opt, adam, rng);
    CHECK(rep.epochs_run < 50);
}
