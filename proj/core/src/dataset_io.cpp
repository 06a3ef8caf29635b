#include "evf/dataset_io.hpp"

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "evf/errors.hpp"

namespace evf {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "'");
    return is;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    return os;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_household_csv(const std::string& path, const HouseholdSeries& h) {
    std::ofstream os = open_out(path);
    os << "interval_start,consumption_kwh\n";
    for (const auto& r : h.readings)
        os << format_civil(r.interval_start) << ',' << fmt_double(r.consumption_kwh)
           << '\n';
    if (!os) throw IoError("write to '" + path + "' failed");
}

HouseholdSeries read_household_csv(const std::string& path) {
    std::ifstream is = open_in(path);
    std::string line;
    if (!std::getline(is, line) || split_csv_line(line) !=
                                       std::vector<std::string>{"interval_start",
                                                                "consumption_kwh"})
        throw DataError("'" + path + "': expected header interval_start,consumption_kwh");
    HouseholdSeries h;
    h.household_id = path;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 2)
            throw DataError("'" + path + "' line " + std::to_string(lineno) +
                            ": expected 2 fields");
        HouseholdReading r;
        r.interval_start = parse_civil(f[0]);
        r.consumption_kwh = std::stod(f[1]);
        if (r.consumption_kwh < 0.0)
            throw DataError("'" + path + "' line " + std::to_string(lineno) +
                            ": negative consumption");
        h.readings.push_back(r);
    }
    return h;
}

void write_weather_csv(const std::string& path, const std::vector<WeatherSeries>& all) {
    std::ofstream os = open_out(path);
    os << "station_id,timestamp,temperature_c\n";
    for (const auto& ws : all)
        for (const auto& r : ws.readings) {
            os << ws.station_id << ',' << format_civil(r.timestamp) << ',';
            if (r.temperature_c) os << fmt_double(*r.temperature_c);
            os << '\n';
        }
    if (!os) throw IoError("write to '" + path + "' failed");
}

std::vector<WeatherSeries> read_weather_csv(const std::string& path) {
    std::ifstream is = open_in(path);
    std::string line;
    if (!std::getline(is, line) ||
        split_csv_line(line) !=
            std::vector<std::string>{"station_id", "timestamp", "temperature_c"})
        throw DataError("'" + path +
                        "': expected header station_id,timestamp,temperature_c");
    std::vector<WeatherSeries> out;
    std::map<std::string, std::size_t> index;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 3)
            throw DataError("'" + path + "' line " + std::to_string(lineno) +
                            ": expected 3 fields");
        auto [it, inserted] = index.emplace(f[0], out.size());
        if (inserted) {
            out.emplace_back();
            out.back().station_id = f[0];
        }
        WeatherReading r;
        r.timestamp = parse_civil(f[1]);
        if (!f[2].empty()) r.temperature_c = std::stod(f[2]);
        out[it->second].readings.push_back(r);
    }
    if (out.empty()) throw DataError("'" + path + "': no weather rows");
    return out;
}

namespace {

json table_to_json(const NormalizedTable& t) {
    json j;
    j["timestamps"] = json::array();
    for (const auto& ts : t.timestamps) j["timestamps"].push_back(format_civil(ts));
    j["dst_flags"] = t.dst_flags;
    j["raw_consumption"] = t.raw_consumption;
    j["rows"] = t.features.rows;
    j["cols"] = t.features.cols;
    j["features"] = t.features.data;
    return j;
}

NormalizedTable table_from_json(const json& j) {
    NormalizedTable t;
    for (const auto& s : j.at("timestamps"))
        t.timestamps.push_back(parse_civil(s.get<std::string>()));
    t.dst_flags = j.at("dst_flags").get<std::vector<int>>();
    t.raw_consumption = j.at("raw_consumption").get<Vector>();
    t.features = Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    t.features.data = j.at("features").get<std::vector<double>>();
    if (t.features.data.size() != t.features.rows * t.features.cols)
        throw IoError("prepared dataset corrupt: feature block size");
    return t;
}

}  // namespace

void save_prepared(const std::string& path, const PreparedDataset& d) {
    json j;
    j["schema_version"] = 1;
    j["window"] = d.window;
    j["slide"] = d.slide;
    j["warnings"] = d.warnings;
    j["norm_stats"] = {{"names", d.stats.names}, {"mean", d.stats.mean},
                       {"sigma", d.stats.sigma},
                       {"scaled", std::vector<int>(d.stats.scaled.begin(), d.stats.scaled.end())},
                       {"dropped", std::vector<int>(d.stats.dropped.begin(), d.stats.dropped.end())},
                       {"id", d.stats.id}};
    j["kept_names"] = d.splits.kept_names;
    j["train"] = table_to_json(d.splits.train);
    j["val"] = table_to_json(d.splits.val);
    j["test"] = table_to_json(d.splits.test);
    std::ofstream os = open_out(path);
    os << j.dump();
    if (!os) throw IoError("write to '" + path + "' failed");
}

PreparedDataset load_prepared(const std::string& path) {
    std::ifstream is = open_in(path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw IoError("'" + path + "': not a prepared dataset (" + e.what() + ")");
    }
    if (j.value("schema_version", 0) != 1)
        throw IoError("'" + path + "': unsupported prepared dataset schema");
    PreparedDataset d;
    d.window = j.at("window").get<std::size_t>();
    d.slide = j.at("slide").get<std::size_t>();
    d.warnings = j.value("warnings", std::vector<std::string>{});
    const json& s = j.at("norm_stats");
    d.stats.names = s.at("names").get<std::vector<std::string>>();
    d.stats.mean = s.at("mean").get<Vector>();
    d.stats.sigma = s.at("sigma").get<Vector>();
    for (int v : s.at("scaled").get<std::vector<int>>()) d.stats.scaled.push_back(v != 0);
    for (int v : s.at("dropped").get<std::vector<int>>()) d.stats.dropped.push_back(v != 0);
    d.stats.id = s.at("id").get<std::string>();
    d.splits.kept_names = j.at("kept_names").get<std::vector<std::string>>();
    d.splits.train = table_from_json(j.at("train"));
    d.splits.val = table_from_json(j.at("val"));
    d.splits.test = table_from_json(j.at("test"));
    return d;
}

void write_forecast_csv(const std::string& path, const std::vector<ForecastRow>& rows) {
    std::ofstream os = open_out(path);
    os << "timestamp,actual,point,mean,sigma,lower,upper\n";
    for (const auto& r : rows) {
        os << format_civil(r.timestamp) << ',';
        if (r.has_actual) os << fmt_double(r.actual);
        os << ',' << fmt_double(r.point) << ',' << fmt_double(r.mean) << ','
           << fmt_double(r.sigma) << ',' << fmt_double(r.lower) << ','
           << fmt_double(r.upper) << '\n';
    }
    if (!os) throw IoError("write to '" + path + "' failed");
}

namespace {

json trial_to_json(const TrialRecord& r) {
    return json{{"index", r.index},
                {"hp",
                 {{"batch_size", r.hp.batch_size},
                  {"window_size", r.hp.window_size},
                  {"hidden_layers", r.hp.hidden_layers},
                  {"hidden_neurons", r.hp.hidden_neurons},
                  {"learning_rate", r.hp.learning_rate},
                  {"dropout_p", r.hp.dropout_p}}},
                {"seed", r.seed},
                {"val_mse", r.val_mse},
                {"val_mape", r.val_mape},
                {"wall_time_s", r.wall_time_s},
                {"epoch_train_loss", r.train_report.epoch_train_loss},
                {"epoch_val_loss", r.train_report.epoch_val_loss}};
}

TrialRecord trial_from_json(const json& j) {
    TrialRecord r;
    r.index = j.at("index").get<std::size_t>();
    const json& hp = j.at("hp");
    r.hp.batch_size = hp.at("batch_size").get<std::size_t>();
    r.hp.window_size = hp.at("window_size").get<std::size_t>();
    r.hp.hidden_layers = hp.at("hidden_layers").get<std::size_t>();
    r.hp.hidden_neurons = hp.at("hidden_neurons").get<std::size_t>();
    r.hp.learning_rate = hp.at("learning_rate").get<double>();
    r.hp.dropout_p = hp.at("dropout_p").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.val_mse = j.at("val_mse").get<double>();
    r.val_mape = j.at("val_mape").get<double>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.train_report.epoch_train_loss = j.at("epoch_train_loss").get<Vector>();
    r.train_report.epoch_val_loss = j.at("epoch_val_loss").get<Vector>();
    r.train_report.epochs_run = r.train_report.epoch_train_loss.size();
    return r;
}

}  // namespace

void append_trial_log(const std::string& path, const TrialRecord& rec) {
    std::ofstream os(path, std::ios::app);
    if (!os) throw IoError("cannot open '" + path + "' for append");
    os << trial_to_json(rec).dump() << '\n';
    if (!os) throw IoError("write to '" + path + "' failed");
}

std::vector<TrialRecord> read_trial_log(const std::string& path) {
    std::ifstream is = open_in(path);
    std::vector<TrialRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        out.push_back(trial_from_json(json::parse(line)));
    }
    return out;
}

namespace {

std::uint64_t fnv1a_bytes(const char* p, std::size_t n) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(p[i]);
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

}  // namespace

std::string string_hash_hex(const std::string& data) {
    return hex64(fnv1a_bytes(data.data(), data.size()));
}

std::string file_hash_hex(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return string_hash_hex(ss.str());
}

}  // namespace evf
