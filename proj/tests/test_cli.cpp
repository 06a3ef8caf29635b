#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "evf/dataset_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workdir {
    fs::path dir;
    Workdir() {
        dir = fs::temp_directory_path() /
              ("evf_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workdir() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(EVF_BIN) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

json read_json(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(is);
    json j;
    is >> j;
    return j;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("end-to-end pipeline over a small synthetic household") {
    Workdir w;
    const std::string data = w / "data";

    REQUIRE(run("generate --out-dir " + data +
                " --seed 7 --start 2019-01-01T00:00 --end 2019-02-20T00:00") == 0);
    REQUIRE(fs::exists(data + "/household.csv"));
    REQUIRE(fs::exists(data + "/weather_station_a.csv"));
    REQUIRE(fs::exists(data + "/generate_meta.json"));

    REQUIRE(run("prepare --household " + data + "/household.csv --weather " + data +
                "/weather_station_a.csv --weather " + data +
                "/weather_station_b.csv --out " + (w / "prepared.json") +
                " --window 12") == 0);

    REQUIRE(run("stats --prepared " + (w / "prepared.json") + " --out " +
                (w / "stats.json")) == 0);
    const json stats = read_json(w / "stats.json");
    CHECK(stats.contains("p_value"));
    CHECK(stats.contains("reject_null"));
    CHECK(stats.contains("config_hash"));

    REQUIRE(run("train --prepared " + (w / "prepared.json") + " --out " +
                (w / "model.bin") + " --report " + (w / "report.json") +
                " --loss-csv " + (w / "loss.csv") +
                " --epochs 2 --neurons 8 --window 12 --seed 5") == 0);
    const json report = read_json(w / "report.json");
    CHECK(report.at("epochs_run") == 2);
    CHECK(report.at("epoch_train_loss").size() == 2);
    CHECK(slurp(w / "loss.csv").rfind("epoch,train_loss,val_loss", 0) == 0);

    REQUIRE(run("forecast --prepared " + (w / "prepared.json") + " --model " +
                (w / "model.bin") + " --out " + (w / "forecast.csv") + " --meta " +
                (w / "fmeta.json") + " --n-passes 10 --seed 5") == 0);
    const std::string fc = slurp(w / "forecast.csv");
    CHECK(fc.rfind("timestamp,actual,point,mean,sigma,lower,upper", 0) == 0);

    REQUIRE(run("evaluate --prepared " + (w / "prepared.json") + " --model " +
                (w / "model.bin") + " --out " + (w / "eval.json") +
                " --n-passes 10 --seed 5") == 0);
    const json eval = read_json(w / "eval.json");
    for (const char* split : {"train", "val", "test"}) {
        CHECK(eval.at("splits").contains(split));
        CHECK(eval.at("splits").at(split).at("point").contains("mape_percent"));
    }
    CHECK(eval.at("picp_test").size() == 4);
}

TEST_CASE("identical invocations produce identical artifacts") {
    Workdir w;
    const std::string data = w / "d";
    REQUIRE(run("generate --out-dir " + data +
                " --seed 11 --start 2019-05-01T00:00 --end 2019-06-05T00:00") == 0);
    REQUIRE(run("prepare --household " + data + "/household.csv --weather " + data +
                "/weather_station_a.csv --out " + (w / "p1.json") + " --window 8") == 0);
    REQUIRE(run("prepare --household " + data + "/household.csv --weather " + data +
                "/weather_station_a.csv --out " + (w / "p2.json") + " --window 8") == 0);
    CHECK(slurp(w / "p1.json") == slurp(w / "p2.json"));

    for (const char* out : {"m1", "m2"})
        REQUIRE(run("train --prepared " + (w / "p1.json") + " --out " + (w / out) +
                    " --report " + (w / (std::string(out) + ".json")) + " --loss-csv " +
                    (w / "loss.csv") + " --epochs 2 --neurons 8 --seed 3") == 0);
    CHECK(slurp(w / "m1") == slurp(w / "m2"));

    for (const char* out : {"f1.csv", "f2.csv"})
        REQUIRE(run("forecast --prepared " + (w / "p1.json") + " --model " + (w / "m1") +
                    " --out " + (w / out) + " --meta " + (w / "fm.json") +
                    " --n-passes 15 --seed 9") == 0);
    CHECK(slurp(w / "f1.csv") == slurp(w / "f2.csv"));
}

TEST_CASE("config file values apply unless overridden on the command line") {
    Workdir w;
    {
        std::ofstream os(w / "cfg.json");
        os << R"({"seed": 21, "start": "2019-03-20T00:00", "end": "2019-04-25T00:00"})";
    }
    REQUIRE(run("--config " + (w / "cfg.json") + " generate --out-dir " + (w / "a")) == 0);
    const json meta = read_json(w / "a/generate_meta.json");
    CHECK(meta.at("config").at("seed") == 21);
    CHECK(meta.at("config").at("start") == "2019-03-20T00:00");

    // CLI flag wins over the file.
    REQUIRE(run("--config " + (w / "cfg.json") + " generate --out-dir " + (w / "b") +
                " --seed 99") == 0);
    CHECK(read_json(w / "b/generate_meta.json").at("config").at("seed") == 99);
}

TEST_CASE("tune writes a trial log and a best point") {
    Workdir w;
    const std::string data = w / "d";
    REQUIRE(run("generate --out-dir " + data +
                " --seed 2 --start 2019-01-01T00:00 --end 2019-02-01T00:00") == 0);
    REQUIRE(run("prepare --household " + data + "/household.csv --weather " + data +
                "/weather_station_a.csv --out " + (w / "p.json") + " --window 8") == 0);
    {
        std::ofstream os(w / "space.json");
        os << R"({"search_space": {"batch_sizes": [16], "window_sizes": [8],
                  "hidden_layers": [1], "hidden_neurons": [4, 8],
                  "learning_rates": [0.01], "dropouts": [0.0]}})";
    }
    REQUIRE(run("--config " + (w / "space.json") + " tune --prepared " + (w / "p.json") +
                " --out-dir " + (w / "t") + " --budget 2 --epochs 1 --seed 4") == 0);
    const json best = read_json(w / "t/best.json");
    CHECK(best.contains("hyperparameters"));
    const auto trials = evf::read_trial_log(w / "t/trials.jsonl");
    CHECK(trials.size() == 2);
    CHECK(trials[0].index == 0);
    CHECK(trials[1].index == 1);
}

TEST_CASE("error paths use the documented exit codes") {
    Workdir w;
    // Unknown subcommand / flag: configuration error.
    CHECK(run("definitely-not-a-command") == 2);
    CHECK(run("generate --bogus-flag 1") == 2);
    // Missing input files: data error.
    CHECK(run("stats --prepared " + (w / "missing.json")) == 3);
    CHECK(run("train --prepared " + (w / "missing.json")) == 3);
    CHECK(run("prepare --household " + (w / "nope.csv") + " --weather " +
              (w / "nope2.csv")) == 3);
    // Malformed config file.
    {
        std::ofstream os(w / "broken.json");
        os << "{not json";
    }
    CHECK(run("--config " + (w / "broken.json") + " generate --out-dir " + (w / "x")) == 2);
    // Corrupt model file.
    {
        std::ofstream os(w / "model.bin", std::ios::binary);
        os << "garbage";
    }
    const std::string data = w / "d";
    REQUIRE(run("generate --out-dir " + data +
                " --seed 2 --start 2019-01-01T00:00 --end 2019-01-20T00:00") == 0);
    REQUIRE(run("prepare --household " + data + "/household.csv --weather " + data +
                "/weather_station_a.csv --out " + (w / "p.json") + " --window 6") == 0);
    CHECK(run("forecast --prepared " + (w / "p.json") + " --model " +
              (w / "model.bin") + " --out " + (w / "f.csv")) == 3);
}
