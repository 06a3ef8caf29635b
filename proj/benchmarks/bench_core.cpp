#include <benchmark/benchmark.h>

#include <random>

#include "evf/forecast.hpp"
#include "evf/lstm.hpp"

using namespace evf;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(r, c);
    for (double& v : m.data) v = u(rng);
    return m;
}

WindowedDataset random_dataset(std::size_t samples, std::size_t w, std::size_t f,
                               Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    WindowedDataset ds;
    ds.window = w;
    ds.features = f;
    for (std::size_t i = 0; i < samples; ++i) {
        ds.inputs.push_back(random_matrix(w, f, rng));
        ds.targets.push_back(u(rng));
    }
    return ds;
}

NormStats unit_stats() {
    NormStats s;
    s.names = {"consumption"};
    s.mean = {0.0};
    s.sigma = {1.0};
    s.scaled = {true};
    s.dropped = {false};
    s.id = "bench";
    return s;
}

void BM_matvec(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const Matrix m = random_matrix(n, n, rng);
    Vector v(n, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(matvec(m, v));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_matvec)->Arg(64)->Arg(128);

void BM_cell_step(benchmark::State& state) {
    const std::size_t h = static_cast<std::size_t>(state.range(0));
    const LstmModel m = make_model(11, {h}, 0.0, 1);
    Rng rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector x(11);
    for (double& v : x) v = u(rng);
    LstmState s{Vector(h, 0.0), Vector(h, 0.0)};
    for (auto _ : state) benchmark::DoNotOptimize(cell_step(m.layers[0], x, s));
}
BENCHMARK(BM_cell_step)->Arg(64)->Arg(128);

void BM_forward_window(benchmark::State& state) {
    const std::size_t w = static_cast<std::size_t>(state.range(0));
    const LstmModel m = make_model(11, {64}, 0.0, 3);
    Rng rng(4);
    const Matrix win = random_matrix(w, 11, rng);
    for (auto _ : state) {
        Rng z(0);
        benchmark::DoNotOptimize(forward_window(m, win, false, z));
    }
}
BENCHMARK(BM_forward_window)->Arg(24)->Arg(72);

void BM_forward_backward(benchmark::State& state) {
    const std::size_t w = static_cast<std::size_t>(state.range(0));
    LstmModel m = make_model(11, {64}, 0.0, 5);
    Rng rng(6);
    const Matrix win = random_matrix(w, 11, rng);
    LstmGrads g = make_grads_like(m);
    for (auto _ : state) {
        ForwardCache cache;
        Rng z(0);
        const double pred = forward_window(m, win, false, z, &cache);
        zero_grads(g);
        backward_window(m, cache, 2.0 * pred, g);
        benchmark::DoNotOptimize(g.head_bias);
    }
}
BENCHMARK(BM_forward_backward)->Arg(24)->Arg(72);

void BM_predict_interval(benchmark::State& state) {
    const std::size_t passes = static_cast<std::size_t>(state.range(0));
    const LstmModel m = make_model(8, {64}, 0.1, 7);
    Rng rng(8);
    const WindowedDataset ds = random_dataset(16, 24, 8, rng);
    const NormStats stats = unit_stats();
    for (auto _ : state) {
        Rng mc(1);
        benchmark::DoNotOptimize(predict_interval(m, ds, passes, 1.0, mc, stats));
    }
}
BENCHMARK(BM_predict_interval)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
