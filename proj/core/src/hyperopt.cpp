#include "evf/hyperopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "evf/errors.hpp"
#include "evf/forecast.hpp"
#include "evf/metrics.hpp"

namespace evf {

std::vector<HyperPoint> enumerate_points(const SearchSpace& space) {
    std::vector<HyperPoint> pts;
    pts.reserve(space.size());
    for (std::size_t b : space.batch_sizes)
        for (std::size_t w : space.window_sizes)
            for (std::size_t l : space.hidden_layers)
                for (std::size_t h : space.hidden_neurons)
                    for (double lr : space.learning_rates)
                        for (double d : space.dropouts)
                            pts.push_back(HyperPoint{b, w, l, h, lr, d});
    return pts;
}

namespace {

// One-hot encoding; every hyperparameter contributes one active coordinate,
// so squared distance between distinct points is 2 * (#differing values).
std::vector<double> encode(const HyperPoint& p, const SearchSpace& s) {
    std::vector<double> x;
    x.reserve(s.batch_sizes.size() + s.window_sizes.size() + s.hidden_layers.size() +
              s.hidden_neurons.size() + s.learning_rates.size() + s.dropouts.size());
    auto onehot = [&x](const auto& values, auto v) {
        for (const auto& cand : values) x.push_back(cand == v ? 1.0 : 0.0);
    };
    onehot(s.batch_sizes, p.batch_size);
    onehot(s.window_sizes, p.window_size);
    onehot(s.hidden_layers, p.hidden_layers);
    onehot(s.hidden_neurons, p.hidden_neurons);
    onehot(s.learning_rates, p.learning_rate);
    onehot(s.dropouts, p.dropout_p);
    return x;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

constexpr double kLengthScale = 2.0;
constexpr double kNoise = 1e-6;

double kernel(const std::vector<double>& a, const std::vector<double>& b) {
    return std::exp(-sq_dist(a, b) / (2.0 * kLengthScale * kLengthScale));
}

// Lower-triangular Cholesky factor of (K + noise I).
struct Cholesky {
    std::vector<std::vector<double>> L;

    explicit Cholesky(std::vector<std::vector<double>> K) : L(std::move(K)) {
        const std::size_t n = L.size();
        for (std::size_t i = 0; i < n; ++i) L[i][i] += kNoise;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = L[i][j];
                for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
                if (i == j)
                    L[i][i] = std::sqrt(s > 0.0 ? s : kNoise);
                else
                    L[i][j] = s / L[j][j];
            }
        }
    }

    // L z = b
    std::vector<double> forward(std::vector<double> b) const {
        for (std::size_t i = 0; i < L.size(); ++i) {
            double s = b[i];
            for (std::size_t k = 0; k < i; ++k) s -= L[i][k] * b[k];
            b[i] = s / L[i][i];
        }
        return b;
    }

    // (K + noise I) x = b
    std::vector<double> solve(std::vector<double> b) const {
        b = forward(std::move(b));
        for (std::size_t i = L.size(); i-- > 0;) {
            double s = b[i];
            for (std::size_t k = i + 1; k < L.size(); ++k) s -= L[k][i] * b[k];
            b[i] = s / L[i][i];
        }
        return b;
    }
};

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double norm_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}

// Expected improvement for minimization at predictive (mu, sigma).
double expected_improvement(double mu, double sigma, double best) {
    if (sigma <= 1e-12) return std::max(0.0, best - mu);
    const double g = (best - mu) / sigma;
    return sigma * (g * norm_cdf(g) + norm_pdf(g));
}

}  // namespace

TuneResult tune(const SearchSpace& space, std::size_t budget,
                const TrialEvaluator& evaluate, std::uint64_t master_seed) {
    if (budget == 0) throw ConfigError("tune: budget must be >= 1");
    const std::vector<HyperPoint> pts = enumerate_points(space);
    TuneResult result;
    if (budget > pts.size()) {
        result.warnings.push_back("tune: budget " + std::to_string(budget) +
                                  " exceeds space size " + std::to_string(pts.size()) +
                                  ", clamping");
        budget = pts.size();
    }

    std::vector<std::size_t> unevaluated(pts.size());
    std::iota(unevaluated.begin(), unevaluated.end(), 0);

    Rng rng(master_seed);
    const std::size_t n_init = std::min(budget, std::max<std::size_t>(8, budget / 10));
    std::shuffle(unevaluated.begin(), unevaluated.end(), rng);
    std::vector<std::size_t> schedule(unevaluated.begin(), unevaluated.begin() + n_init);
    unevaluated.erase(unevaluated.begin(), unevaluated.begin() + n_init);
    // Surrogate work below scans candidates in lexicographic order.
    std::sort(unevaluated.begin(), unevaluated.end());

    std::vector<std::vector<double>> X;
    std::vector<double> y;

    auto run_trial = [&](std::size_t pt_index) {
        TrialRecord rec = evaluate(pts[pt_index], master_seed + result.all.size());
        rec.index = result.all.size();
        X.push_back(encode(pts[pt_index], space));
        y.push_back(rec.val_mse);
        result.all.push_back(std::move(rec));
    };

    for (std::size_t idx : schedule) run_trial(idx);

    while (result.all.size() < budget) {
        // Standardize the objective before fitting.
        const std::size_t n = y.size();
        double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
        double var = 0.0;
        for (double v : y) var += (v - mean) * (v - mean);
        double sd = std::sqrt(var / static_cast<double>(n));
        if (sd <= 0.0) sd = 1.0;
        std::vector<double> ys(n);
        for (std::size_t i = 0; i < n; ++i) ys[i] = (y[i] - mean) / sd;
        const double best = *std::min_element(ys.begin(), ys.end());

        std::vector<std::vector<double>> K(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) K[i][j] = kernel(X[i], X[j]);
        const Cholesky chol(std::move(K));
        const std::vector<double> alpha = chol.solve(ys);

        double best_ei = -1.0;
        std::size_t best_slot = 0;
        for (std::size_t slot = 0; slot < unevaluated.size(); ++slot) {
            const std::vector<double> x = encode(pts[unevaluated[slot]], space);
            std::vector<double> kx(n);
            double mu = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                kx[i] = kernel(x, X[i]);
                mu += kx[i] * alpha[i];
            }
            const std::vector<double> v = chol.forward(kx);
            double explained = 0.0;
            for (double vi : v) explained += vi * vi;
            double var_pred = 1.0 - explained;  // prior k(x,x) == 1
            if (var_pred < 0.0) var_pred = 0.0;
            const double ei = expected_improvement(mu, std::sqrt(var_pred), best);
            if (ei > best_ei + 1e-15) {
                best_ei = ei;
                best_slot = slot;
            }
        }
        run_trial(unevaluated[best_slot]);
        unevaluated.erase(unevaluated.begin() + static_cast<std::ptrdiff_t>(best_slot));
    }

    const std::vector<TrialRecord> ranked = leaderboard(result.all);
    result.best = ranked.front();
    return result;
}

std::vector<TrialRecord> leaderboard(std::vector<TrialRecord> all) {
    if (all.empty()) throw ConfigError("leaderboard: no trials");
    std::stable_sort(all.begin(), all.end(), [](const TrialRecord& a, const TrialRecord& b) {
        if (a.val_mse != b.val_mse) return a.val_mse < b.val_mse;
        return a.hp < b.hp;
    });
    return all;
}

TrialEvaluator make_lstm_evaluator(const NormalizedSplit& data, const NormStats& stats,
                                   std::size_t epochs, std::size_t slide,
                                   const TrainOptions* base_options) {
    TrainOptions base = base_options ? *base_options : TrainOptions{};
    return [&data, &stats, epochs, slide, base](const HyperPoint& hp,
                                                std::uint64_t seed) -> TrialRecord {
        const auto t_start = std::chrono::steady_clock::now();
        const WindowedDataset train_ds = window(data.train, hp.window_size, slide);
        const WindowedDataset val_ds = window(data.val, hp.window_size, slide);

        std::vector<std::size_t> hidden(hp.hidden_layers, hp.hidden_neurons);
        LstmModel model =
            make_model(train_ds.features, hidden, hp.dropout_p, seed);
        model.norm_stats_id = stats.id;
        AdamState adam;
        adam.learning_rate = hp.learning_rate;
        TrainOptions opt = base;
        opt.batch_size = hp.batch_size;
        opt.epochs = epochs;
        Rng rng(seed);

        TrialRecord rec;
        rec.hp = hp;
        rec.seed = seed;
        rec.train_report = train(model, train_ds, val_ds, opt, adam, rng);
        rec.val_mse = mse_loss(model, val_ds);

        const Vector pred = predict_point(model, val_ds, stats);
        Vector actual(val_ds.size());
        for (std::size_t i = 0; i < val_ds.size(); ++i)
            actual[i] = stats.inverse_consumption(val_ds.targets[i]);
        rec.val_mape = metrics(actual, pred).mape;
        rec.wall_time_s = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t_start)
                              .count();
        return rec;
    };
}

}  // namespace evf
