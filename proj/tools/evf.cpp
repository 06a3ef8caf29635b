// evf: command-line front end for the interval load-forecasting pipeline.
//
// Subcommands: generate, prepare, stats, tune, train, forecast, evaluate.
// Every command is deterministic given the same inputs and seed; reports
// carry the hash of the resolved configuration.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "evf/dataset_io.hpp"
#include "evf/errors.hpp"
#include "evf/forecast.hpp"
#include "evf/hyperopt.hpp"
#include "evf/lstm.hpp"
#include "evf/metrics.hpp"
#include "evf/pipeline.hpp"
#include "evf/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace evf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

json g_config;  // from --config, overlaid between defaults and CLI flags

json load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    try {
        json j;
        is >> j;
        return j;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
}

template <typename T>
void overlay(const CLI::App& app, const std::string& flag, const char* key, T& value) {
    if (app.get_option(flag)->count() > 0) return;  // CLI wins
    if (g_config.contains(key)) value = g_config.at(key).get<T>();
}

std::string resolved_hash(const json& resolved) { return string_hash_hex(resolved.dump()); }

void write_json(const std::string& path, const json& j) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << j.dump(2) << '\n';
    if (!os) throw IoError("write to '" + path + "' failed");
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

Vector actual_kwh(const NormalizedTable& t, std::size_t w, std::size_t s) {
    const std::size_t T = t.raw_consumption.size();
    Vector out;
    if (T <= w) return out;
    const std::size_t count = (T - w - 1) / s + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(t.raw_consumption[i * s + w]);
    return out;
}

json metrics_to_json(const MetricsReport& m) {
    return json{{"mape_percent", m.mape}, {"mse", m.mse},           {"rmse", m.rmse},
                {"mae", m.mae},           {"n", m.n},               {"mape_excluded", m.mape_excluded}};
}

json hp_to_json(const HyperPoint& hp) {
    return json{{"batch_size", hp.batch_size},       {"window_size", hp.window_size},
                {"hidden_layers", hp.hidden_layers}, {"hidden_neurons", hp.hidden_neurons},
                {"learning_rate", hp.learning_rate}, {"dropout_p", hp.dropout_p}};
}

HyperPoint hp_from_json(const json& j) {
    HyperPoint hp;
    hp.batch_size = j.at("batch_size").get<std::size_t>();
    hp.window_size = j.at("window_size").get<std::size_t>();
    hp.hidden_layers = j.at("hidden_layers").get<std::size_t>();
    hp.hidden_neurons = j.at("hidden_neurons").get<std::size_t>();
    hp.learning_rate = j.at("learning_rate").get<double>();
    hp.dropout_p = j.at("dropout_p").get<double>();
    return hp;
}

SearchSpace space_from_config() {
    SearchSpace space = SearchSpace::default_grid();
    if (!g_config.contains("search_space")) return space;
    const json& s = g_config.at("search_space");
    if (s.contains("batch_sizes")) space.batch_sizes = s.at("batch_sizes").get<std::vector<std::size_t>>();
    if (s.contains("window_sizes")) space.window_sizes = s.at("window_sizes").get<std::vector<std::size_t>>();
    if (s.contains("hidden_layers")) space.hidden_layers = s.at("hidden_layers").get<std::vector<std::size_t>>();
    if (s.contains("hidden_neurons")) space.hidden_neurons = s.at("hidden_neurons").get<std::vector<std::size_t>>();
    if (s.contains("learning_rates")) space.learning_rates = s.at("learning_rates").get<std::vector<double>>();
    if (s.contains("dropouts")) space.dropouts = s.at("dropouts").get<std::vector<double>>();
    return space;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::string out_dir = ".";
    std::uint64_t seed = 42;
    std::string start = "2018-07-22T00:00";
    std::string end = "2020-07-21T00:00";
    double base_load_kw = 0.6;
    double hvac_gain = 0.05;
    double ev_charger_kw = 7.2;
    double ev_sessions_per_week = 3.0;
    double noise_std_kw = 0.15;
    double missing_temp_rate = 0.01;
};

int cmd_generate(const GenerateArgs& a) {
    SynthConfig cfg;
    cfg.seed = a.seed;
    cfg.start = parse_civil(a.start);
    cfg.end = parse_civil(a.end);
    cfg.base_load_kw = a.base_load_kw;
    cfg.hvac_gain_kw_per_degc = a.hvac_gain;
    cfg.ev_charger_kw = a.ev_charger_kw;
    cfg.ev_sessions_per_week = a.ev_sessions_per_week;
    cfg.noise_std_kw = a.noise_std_kw;
    cfg.missing_temp_rate = a.missing_temp_rate;

    const SynthOutput out = generate(cfg);
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    write_household_csv((dir / "household.csv").string(), out.household);
    write_weather_csv((dir / "weather_station_a.csv").string(), {out.stations[0]});
    write_weather_csv((dir / "weather_station_b.csv").string(), {out.stations[1]});

    json resolved = {{"command", "generate"},
                     {"seed", a.seed},
                     {"start", a.start},
                     {"end", a.end},
                     {"base_load_kw", a.base_load_kw},
                     {"hvac_gain_kw_per_degc", a.hvac_gain},
                     {"ev_charger_kw", a.ev_charger_kw},
                     {"ev_sessions_per_week", a.ev_sessions_per_week},
                     {"noise_std_kw", a.noise_std_kw},
                     {"missing_temp_rate", a.missing_temp_rate}};
    json meta = {{"config", resolved},
                 {"config_hash", resolved_hash(resolved)},
                 {"rows", out.household.readings.size()},
                 {"ev_sessions", out.n_sessions},
                 {"ev_disabled", a.ev_sessions_per_week == 0.0}};
    write_json((dir / "generate_meta.json").string(), meta);
    std::cout << "generated " << out.household.readings.size() << " hourly rows, "
              << out.n_sessions << " EV sessions\n";
    return kExitOk;
}

// ---------------------------------------------------------------- prepare

struct PrepareArgs {
    std::string household;
    std::vector<std::string> weather;
    std::string out = "prepared.json";
    std::string lockdown_cutoff;  // empty = keep everything
    std::size_t window = 24;
    std::size_t slide = 1;
};

int cmd_prepare(const PrepareArgs& a) {
    PipelineLog log;
    HouseholdSeries household;
    try {
        household = read_household_csv(a.household);
    } catch (const IoError& e) {
        throw DataError(std::string("prepare[load-household]: ") + e.what());
    }

    std::vector<WeatherSeries> stations;
    for (const auto& path : a.weather) {
        std::vector<WeatherSeries> part;
        try {
            part = read_weather_csv(path);
        } catch (const IoError& e) {
            throw DataError(std::string("prepare[load-weather]: ") + e.what());
        }
        stations.insert(stations.end(), part.begin(), part.end());
    }
    if (stations.empty()) throw DataError("prepare[load-weather]: no stations given");

    DstRule rule;
    for (auto& st : stations) st = fill_missing_temperature(st);
    const WeatherSeries averaged = average_stations(stations);
    TimeTable table = merge(household, averaged, rule, &log);
    if (!a.lockdown_cutoff.empty())
        table = lockdown_filter(table, parse_civil(a.lockdown_cutoff));

    const SplitTable parts = split(table);
    NormStats stats;
    PreparedDataset prepared;
    prepared.splits = normalize(parts, stats, false, &log);
    prepared.stats = stats;
    prepared.window = a.window;
    prepared.slide = a.slide;
    prepared.warnings = log.warnings;
    save_prepared(a.out, prepared);

    print_warnings(log.warnings);
    std::cout << "prepared " << table.rows.size() << " rows (train "
              << parts.train.rows.size() << " / val " << parts.val.rows.size()
              << " / test " << parts.test.rows.size() << ") -> " << a.out << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
    std::string prepared;
    std::string out = "stats.json";
    double alpha = 0.05;
};

int cmd_stats(const StatsArgs& a) {
    const PreparedDataset d = load_prepared(a.prepared);
    if (d.splits.train.raw_consumption.empty() || d.splits.test.raw_consumption.empty())
        throw DataError("stats: empty split in prepared dataset");
    // Raw kWh, pre-normalization.
    const MannWhitneyResult r = mann_whitney(d.splits.train.raw_consumption,
                                             d.splits.test.raw_consumption, a.alpha);
    json resolved = {{"command", "stats"}, {"prepared", a.prepared}, {"alpha", a.alpha}};
    json out = {{"config_hash", resolved_hash(resolved)},
                {"u_statistic", r.u_statistic},
                {"p_value", r.p_value},
                {"method", r.method == MwMethod::Exact ? "exact" : "normal-approximation"},
                {"n_train", r.n1},
                {"n_test", r.n2},
                {"alpha", a.alpha},
                {"reject_null", r.reject}};
    write_json(a.out, out);
    std::cout << "Mann-Whitney train vs test: p = " << r.p_value << " -> "
              << (r.reject ? "reject" : "retain") << " null at "
              << a.alpha * 100 << "%\n";
    return kExitOk;
}

// ---------------------------------------------------------------- tune

struct TuneArgs {
    std::string prepared;
    std::string out_dir = ".";
    std::size_t budget = 80;
    std::size_t epochs = 150;
    std::uint64_t seed = 42;
};

int cmd_tune(const TuneArgs& a) {
    const PreparedDataset d = load_prepared(a.prepared);
    const SearchSpace space = space_from_config();
    fs::create_directories(a.out_dir);
    const std::string log_path = (fs::path(a.out_dir) / "trials.jsonl").string();
    std::ofstream(log_path, std::ios::trunc);  // fresh log per run

    const TrialEvaluator inner = make_lstm_evaluator(d.splits, d.stats, a.epochs, d.slide);
    std::size_t next_index = 0;
    const TrialEvaluator logged = [&](const HyperPoint& hp, std::uint64_t seed) {
        TrialRecord rec = inner(hp, seed);
        rec.index = next_index++;
        append_trial_log(log_path, rec);
        std::cout << "trial " << rec.index << ": val_mse=" << rec.val_mse
                  << " val_mape=" << rec.val_mape << "%\n";
        return rec;
    };

    const TuneResult result = tune(space, a.budget, logged, a.seed);
    print_warnings(result.warnings);

    json resolved = {{"command", "tune"},   {"prepared", a.prepared},
                     {"budget", a.budget},  {"epochs", a.epochs},
                     {"seed", a.seed}};
    json best = {{"config_hash", resolved_hash(resolved)},
                 {"hyperparameters", hp_to_json(result.best.hp)},
                 {"seed", result.best.seed},
                 {"val_mse", result.best.val_mse},
                 {"val_mape", result.best.val_mape},
                 {"trials", result.all.size()}};
    write_json((fs::path(a.out_dir) / "best.json").string(), best);
    std::cout << "best val_mse " << result.best.val_mse << " at "
              << hp_to_json(result.best.hp).dump() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string prepared;
    std::string out = "model.bin";
    std::string report = "train_report.json";
    std::string loss_csv = "loss_curve.csv";
    std::string from_best;  // best.json from tune
    std::size_t batch_size = 32;
    std::size_t window = 0;  // 0 = prepared default
    std::size_t layers = 1;
    std::size_t neurons = 64;
    double learning_rate = 1e-3;
    double dropout = 0.1;
    std::size_t epochs = 150;
    std::uint64_t seed = 42;
    bool no_clip = false;
    int patience = 0;
};

int cmd_train(const TrainArgs& a) {
    const PreparedDataset d = load_prepared(a.prepared);
    HyperPoint hp;
    hp.batch_size = a.batch_size;
    hp.window_size = a.window ? a.window : d.window;
    hp.hidden_layers = a.layers;
    hp.hidden_neurons = a.neurons;
    hp.learning_rate = a.learning_rate;
    hp.dropout_p = a.dropout;
    if (!a.from_best.empty()) {
        std::ifstream is(a.from_best);
        if (!is) throw DataError("train: cannot open '" + a.from_best + "' (run tune first)");
        json j;
        is >> j;
        hp = hp_from_json(j.at("hyperparameters"));
    }

    const WindowedDataset train_ds = window(d.splits.train, hp.window_size, d.slide);
    const WindowedDataset val_ds = window(d.splits.val, hp.window_size, d.slide);

    std::vector<std::size_t> hidden(hp.hidden_layers, hp.hidden_neurons);
    LstmModel model = make_model(train_ds.features, hidden, hp.dropout_p, a.seed);
    model.norm_stats_id = d.stats.id;
    AdamState adam;
    adam.learning_rate = hp.learning_rate;
    TrainOptions opt;
    opt.batch_size = hp.batch_size;
    opt.epochs = a.epochs;
    opt.clip_enabled = !a.no_clip;
    opt.early_stop_patience = a.patience;
    Rng rng(a.seed);

    const TrainReport report = train(model, train_ds, val_ds, opt, adam, rng);
    save_model(model, a.out);

    json resolved = {{"command", "train"},  {"prepared", a.prepared},
                     {"hyperparameters", hp_to_json(hp)},
                     {"epochs", a.epochs},  {"seed", a.seed},
                     {"clip", !a.no_clip},  {"patience", a.patience}};
    json rep = {{"config_hash", resolved_hash(resolved)},
                {"model", a.out},
                {"model_hash", file_hash_hex(a.out)},
                {"epochs_run", report.epochs_run},
                {"epoch_train_loss", report.epoch_train_loss},
                {"epoch_val_loss", report.epoch_val_loss}};
    write_json(a.report, rep);

    std::ofstream loss(a.loss_csv, std::ios::trunc);
    loss << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < report.epochs_run; ++e)
        loss << e + 1 << ',' << report.epoch_train_loss[e] << ','
             << report.epoch_val_loss[e] << '\n';

    std::cout << "trained " << report.epochs_run << " epochs, final val loss "
              << (report.epoch_val_loss.empty() ? 0.0 : report.epoch_val_loss.back())
              << " -> " << a.out << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- forecast

struct ForecastArgs {
    std::string prepared;
    std::string model;
    std::string out = "forecast.csv";
    std::string meta = "forecast_meta.json";
    std::string split = "test";
    std::size_t n_passes = 100;
    double k = 1.0;
    std::uint64_t seed = 42;
};

const NormalizedTable& pick_split(const PreparedDataset& d, const std::string& name) {
    if (name == "train") return d.splits.train;
    if (name == "val") return d.splits.val;
    if (name == "test") return d.splits.test;
    throw ConfigError("unknown split '" + name + "' (train|val|test)");
}

int cmd_forecast(const ForecastArgs& a) {
    const PreparedDataset d = load_prepared(a.prepared);
    LstmModel model;
    try {
        model = load_model(a.model);
    } catch (const IoError& e) {
        throw DataError(std::string("forecast: ") + e.what() + " (run train first)");
    }
    if (!model.norm_stats_id.empty() && model.norm_stats_id != d.stats.id)
        throw DataError("forecast: model was trained with different normalization stats");

    const NormalizedTable& table = pick_split(d, a.split);
    const std::size_t w = d.window;
    const WindowedDataset ds = window(table, w, d.slide);
    const std::vector<CivilTime> times = window_target_times(table, w, d.slide);
    const Vector actual = actual_kwh(table, w, d.slide);

    PipelineLog log;
    const Vector point = predict_point(model, ds, d.stats);
    Rng rng(a.seed);
    const std::vector<IntervalForecast> intervals =
        predict_interval(model, ds, a.n_passes, a.k, rng, d.stats, &log);
    print_warnings(log.warnings);

    std::vector<ForecastRow> rows(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        rows[i].timestamp = times[i];
        rows[i].actual = actual[i];
        rows[i].has_actual = true;
        rows[i].point = point[i];
        rows[i].mean = intervals[i].mean;
        rows[i].sigma = intervals[i].sigma;
        rows[i].lower = intervals[i].lower;
        rows[i].upper = intervals[i].upper;
    }
    write_forecast_csv(a.out, rows);

    json resolved = {{"command", "forecast"}, {"prepared", a.prepared},
                     {"model", a.model},      {"split", a.split},
                     {"n_passes", a.n_passes}, {"k", a.k},
                     {"seed", a.seed},        {"window", w}};
    json meta = {{"config_hash", resolved_hash(resolved)},
                 {"model_hash", file_hash_hex(a.model)},
                 {"n_passes", a.n_passes},
                 {"k", a.k},
                 {"seed", a.seed},
                 {"samples", ds.size()},
                 {"warnings", log.warnings}};
    write_json(a.meta, meta);
    std::cout << "forecast " << ds.size() << " timesteps (" << a.split << ") -> "
              << a.out << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string prepared;
    std::string model;
    std::string out = "evaluation.json";
    std::size_t n_passes = 100;
    std::uint64_t seed = 42;
};

int cmd_evaluate(const EvaluateArgs& a) {
    const PreparedDataset d = load_prepared(a.prepared);
    LstmModel model;
    try {
        model = load_model(a.model);
    } catch (const IoError& e) {
        throw DataError(std::string("evaluate: ") + e.what() + " (run train first)");
    }

    PipelineLog log;
    json per_split;
    json picp_json;
    for (const std::string name : {"train", "val", "test"}) {
        const NormalizedTable& table = pick_split(d, name);
        const WindowedDataset ds = window(table, d.window, d.slide);
        const Vector actual = actual_kwh(table, d.window, d.slide);

        const Vector point = predict_point(model, ds, d.stats);
        Rng rng(a.seed);
        const std::vector<IntervalForecast> intervals =
            predict_interval(model, ds, a.n_passes, 1.0, rng, d.stats, &log);
        Vector interval_mean(intervals.size());
        for (std::size_t i = 0; i < intervals.size(); ++i)
            interval_mean[i] = intervals[i].mean;

        per_split[name] = {{"point", metrics_to_json(metrics(actual, point))},
                           {"interval", metrics_to_json(metrics(actual, interval_mean))}};
        if (name == "test") {
            for (double k : {1.0, 2.0, 3.0, 5.0})
                picp_json["k" + std::to_string(static_cast<int>(k))] =
                    picp(intervals, actual, k).coverage;
        }
    }
    print_warnings(log.warnings);

    json resolved = {{"command", "evaluate"}, {"prepared", a.prepared},
                     {"model", a.model},      {"n_passes", a.n_passes},
                     {"seed", a.seed},        {"window", d.window}};
    json out = {{"config_hash", resolved_hash(resolved)},
                {"model_hash", file_hash_hex(a.model)},
                {"splits", per_split},
                {"picp_test", picp_json},
                {"warnings", log.warnings}};
    write_json(a.out, out);
    std::cout << "evaluation -> " << a.out << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSTM interval load forecasting for EV households"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (CLI flags take precedence)");

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "Write a synthetic household + weather CSVs");
    c_gen->add_option("--out-dir", gen.out_dir, "Output directory");
    c_gen->add_option("--seed", gen.seed, "Master seed");
    c_gen->add_option("--start", gen.start, "First hour (ISO-8601 local)");
    c_gen->add_option("--end", gen.end, "Last hour (inclusive)");
    c_gen->add_option("--base-load-kw", gen.base_load_kw, "Household base load");
    c_gen->add_option("--hvac-gain", gen.hvac_gain, "kW per degC away from 18");
    c_gen->add_option("--ev-charger-kw", gen.ev_charger_kw, "Charger power");
    c_gen->add_option("--ev-sessions-per-week", gen.ev_sessions_per_week, "Expected sessions");
    c_gen->add_option("--noise-std-kw", gen.noise_std_kw, "Load noise");
    c_gen->add_option("--missing-temp-rate", gen.missing_temp_rate, "Missing temperature rate");

    PrepareArgs prep;
    auto* c_prep = app.add_subcommand("prepare", "Run the data pipeline into a prepared dataset");
    c_prep->add_option("--household", prep.household, "Household CSV")->required();
    c_prep->add_option("--weather", prep.weather, "Weather CSV (repeatable)")->required();
    c_prep->add_option("--out", prep.out, "Prepared dataset file");
    c_prep->add_option("--lockdown-cutoff", prep.lockdown_cutoff,
                       "Keep rows before this date-time (e.g. 2020-03-01T00:00)");
    c_prep->add_option("--window", prep.window, "Default window size");
    c_prep->add_option("--slide", prep.slide, "Slide step");

    StatsArgs st;
    auto* c_stats = app.add_subcommand("stats", "Mann-Whitney train vs test consumption");
    c_stats->add_option("--prepared", st.prepared, "Prepared dataset")->required();
    c_stats->add_option("--out", st.out, "Report file");
    c_stats->add_option("--alpha", st.alpha, "Significance level");

    TuneArgs tu;
    auto* c_tune = app.add_subcommand("tune", "Hyperparameter search");
    c_tune->add_option("--prepared", tu.prepared, "Prepared dataset")->required();
    c_tune->add_option("--out-dir", tu.out_dir, "Where trials.jsonl and best.json go");
    c_tune->add_option("--budget", tu.budget, "Number of trials");
    c_tune->add_option("--epochs", tu.epochs, "Training epochs per trial");
    c_tune->add_option("--seed", tu.seed, "Master seed");

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "Train one model");
    c_train->add_option("--prepared", tr.prepared, "Prepared dataset")->required();
    c_train->add_option("--out", tr.out, "Model file");
    c_train->add_option("--report", tr.report, "Training report JSON");
    c_train->add_option("--loss-csv", tr.loss_csv, "Loss-curve plot data");
    c_train->add_option("--from-best", tr.from_best, "Use hyperparameters from tune's best.json");
    c_train->add_option("--batch-size", tr.batch_size, "Batch size");
    c_train->add_option("--window", tr.window, "Window size (0 = prepared default)");
    c_train->add_option("--layers", tr.layers, "LSTM layers");
    c_train->add_option("--neurons", tr.neurons, "Hidden neurons per layer");
    c_train->add_option("--lr", tr.learning_rate, "Adam learning rate");
    c_train->add_option("--dropout", tr.dropout, "Dropout probability");
    c_train->add_option("--epochs", tr.epochs, "Epochs");
    c_train->add_option("--seed", tr.seed, "Seed");
    c_train->add_flag("--no-clip", tr.no_clip, "Disable gradient clipping");
    c_train->add_option("--patience", tr.patience, "Early-stop patience (0 = off)");

    ForecastArgs fo;
    auto* c_fore = app.add_subcommand("forecast", "Point + interval forecasts");
    c_fore->add_option("--prepared", fo.prepared, "Prepared dataset")->required();
    c_fore->add_option("--model", fo.model, "Model file")->required();
    c_fore->add_option("--out", fo.out, "Forecast CSV");
    c_fore->add_option("--meta", fo.meta, "Metadata JSON");
    c_fore->add_option("--split", fo.split, "train|val|test");
    c_fore->add_option("--n-passes", fo.n_passes, "Stochastic passes per sample");
    c_fore->add_option("--k", fo.k, "Interval half-width in sigmas");
    c_fore->add_option("--seed", fo.seed, "Seed");

    EvaluateArgs ev;
    auto* c_eval = app.add_subcommand("evaluate", "Metrics for point and interval forecasts");
    c_eval->add_option("--prepared", ev.prepared, "Prepared dataset")->required();
    c_eval->add_option("--model", ev.model, "Model file")->required();
    c_eval->add_option("--out", ev.out, "Evaluation JSON");
    c_eval->add_option("--n-passes", ev.n_passes, "Stochastic passes per sample");
    c_eval->add_option("--seed", ev.seed, "Seed");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e);
            return code == 0 ? kExitOk : kExitConfig;
        }
        if (!config_path.empty()) g_config = load_config_file(config_path);

        if (c_gen->parsed()) {
            overlay(*c_gen, "--seed", "seed", gen.seed);
            overlay(*c_gen, "--out-dir", "out_dir", gen.out_dir);
            overlay(*c_gen, "--start", "start", gen.start);
            overlay(*c_gen, "--end", "end", gen.end);
            overlay(*c_gen, "--base-load-kw", "base_load_kw", gen.base_load_kw);
            overlay(*c_gen, "--hvac-gain", "hvac_gain_kw_per_degc", gen.hvac_gain);
            overlay(*c_gen, "--ev-charger-kw", "ev_charger_kw", gen.ev_charger_kw);
            overlay(*c_gen, "--ev-sessions-per-week", "ev_sessions_per_week",
                    gen.ev_sessions_per_week);
            overlay(*c_gen, "--noise-std-kw", "noise_std_kw", gen.noise_std_kw);
            overlay(*c_gen, "--missing-temp-rate", "missing_temp_rate", gen.missing_temp_rate);
            return cmd_generate(gen);
        }
        if (c_prep->parsed()) {
            overlay(*c_prep, "--lockdown-cutoff", "lockdown_cutoff", prep.lockdown_cutoff);
            overlay(*c_prep, "--window", "window", prep.window);
            overlay(*c_prep, "--slide", "slide", prep.slide);
            return cmd_prepare(prep);
        }
        if (c_stats->parsed()) {
            overlay(*c_stats, "--alpha", "alpha", st.alpha);
            return cmd_stats(st);
        }
        if (c_tune->parsed()) {
            overlay(*c_tune, "--budget", "budget", tu.budget);
            overlay(*c_tune, "--epochs", "epochs", tu.epochs);
            overlay(*c_tune, "--seed", "seed", tu.seed);
            return cmd_tune(tu);
        }
        if (c_train->parsed()) {
            overlay(*c_train, "--epochs", "epochs", tr.epochs);
            overlay(*c_train, "--seed", "seed", tr.seed);
            return cmd_train(tr);
        }
        if (c_fore->parsed()) {
            overlay(*c_fore, "--n-passes", "n_passes", fo.n_passes);
            overlay(*c_fore, "--k", "k", fo.k);
            overlay(*c_fore, "--seed", "seed", fo.seed);
            return cmd_forecast(fo);
        }
        if (c_eval->parsed()) {
            overlay(*c_eval, "--n-passes", "n_passes", ev.n_passes);
            overlay(*c_eval, "--seed", "seed", ev.seed);
            return cmd_evaluate(ev);
        }
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
