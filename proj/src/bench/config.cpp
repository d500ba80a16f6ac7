#include "eqf/bench/config.hpp"

#include "eqf/error.hpp"
#include "eqf/bench/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace eqf::bench {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::size_t to_count(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw Error(Errc::ConfigError, key + ": expected a non-negative integer, got '" + v + "'");
    return out;
}

double to_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw Error(Errc::ConfigError, key + ": expected a number, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(Errc::ConfigError, key + ": expected true/false, got '" + v + "'");
}

nn::Dims3 to_dims(const std::string& key, const std::string& v) {
    nn::Dims3 d{};
    std::stringstream ss(v);
    std::string part;
    std::size_t i = 0;
    while (std::getline(ss, part, 'x')) {
        if (i == 3) break;
        d[i++] = to_count(key, trim(part));
    }
    if (i != 3 || std::getline(ss, part, 'x')) throw Error(Errc::ConfigError, key + ": expected HxWxD, got '" + v + "'");
    return d;
}

nlohmann::json train_json(const nn::TrainConfig& t) {
    return {{"epochs", t.epochs}, {"window", t.window}, {"batch_size", t.batch_size}, {"seed", t.seed}, {"lr", t.lr}};
}

}  // namespace

bool RunConfig::enabled(const std::string& model) const {
    return std::find(models.begin(), models.end(), model) != models.end();
}

SplitSpec parse_split(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error(Errc::ConfigError, "split: expected TRAIN:TEST, got '" + text + "'");
    SplitSpec s;
    s.train_len = to_count("split", trim(text.substr(0, colon)));
    s.test_len = to_count("split", trim(text.substr(colon + 1)));
    return s;
}

std::vector<std::string> parse_models(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part.empty()) continue;
        if (std::find(kKnownModels.begin(), kKnownModels.end(), part) == kKnownModels.end())
            throw Error(Errc::ConfigError, "unknown model '" + part + "' (expected garch, var, lstm, cnn)");
        if (std::find(out.begin(), out.end(), part) == out.end()) out.push_back(part);
    }
    return out;
}

void set_seed(RunConfig& cfg, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.lstm.seed = seed;
    cfg.cnn.seed = seed + 1;
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string v = trim(raw_value);
    if (key == "data") cfg.data = v;
    else if (key == "second_data") cfg.second_data = v;
    else if (key == "column") cfg.column = v;
    else if (key == "split") cfg.split = parse_split(v);
    else if (key == "models") cfg.models = parse_models(v);
    else if (key == "seed") set_seed(cfg, to_count(key, v));
    else if (key == "rolling") cfg.rolling = to_bool(key, v);
    else if (key == "out") cfg.out = v;
    else if (key == "garch.p") cfg.garch_p = to_count(key, v);
    else if (key == "garch.q") cfg.garch_q = to_count(key, v);
    else if (key == "var.order") cfg.var_order = v == "auto" ? 0 : to_count(key, v);
    else if (key == "var.max_p") cfg.var_max_p = to_count(key, v);
    else if (key == "lstm.window") cfg.lstm.window = to_count(key, v);
    else if (key == "lstm.epochs") cfg.lstm.epochs = to_count(key, v);
    else if (key == "lstm.batch_size") cfg.lstm.batch_size = to_count(key, v);
    else if (key == "lstm.seed") cfg.lstm.seed = to_count(key, v);
    else if (key == "lstm.lr") cfg.lstm.lr = to_real(key, v);
    else if (key == "cnn.window") cfg.cnn.window = to_count(key, v);
    else if (key == "cnn.epochs") cfg.cnn.epochs = to_count(key, v);
    else if (key == "cnn.batch_size") cfg.cnn.batch_size = to_count(key, v);
    else if (key == "cnn.seed") cfg.cnn.seed = to_count(key, v);
    else if (key == "cnn.lr") cfg.cnn.lr = to_real(key, v);
    else if (key == "cnn.dims") cfg.cnn_dims = to_dims(key, v);
    else if (key == "epochs") cfg.lstm.epochs = cfg.cnn.epochs = to_count(key, v);
    else if (key == "hybrid.validation_fraction") cfg.validation_fraction = to_real(key, v);
    else if (key == "correlogram.lags") cfg.correlogram_lags = to_count(key, v);
    else throw Error(Errc::ConfigError, "unknown setting '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    const std::string text = read_text(path);
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::ConfigError, path.string() + " line " + std::to_string(lineno) + ": expected key=value");
        try {
            apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(e.code(), path.string() + " line " + std::to_string(lineno) + ": " + e.detail());
        }
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    RunConfig cfg;
    apply_config_file(cfg, path);
    return cfg;
}

void validate(const RunConfig& cfg) {
    auto fail = [](const std::string& msg) { throw Error(Errc::ConfigError, msg); };
    if (cfg.models.empty()) fail("at least one model must be enabled");
    for (const auto& m : cfg.models)
        if (std::find(kKnownModels.begin(), kKnownModels.end(), m) == kKnownModels.end()) fail("unknown model '" + m + "'");
    if (cfg.data.empty()) fail("no primary data file given");
    if (cfg.enabled("var") && cfg.second_data.empty()) fail("the var model needs a second series (second_data)");
    if (cfg.garch_p < 1) fail("garch.p must be >= 1");
    if (cfg.var_max_p < 1) fail("var.max_p must be >= 1");
    for (const auto* t : {&cfg.lstm, &cfg.cnn}) {
        if (t->epochs < 1 || t->window < 1 || t->batch_size < 1) fail("epochs, window and batch_size must be >= 1");
        if (!(t->lr > 0.0)) fail("learning rates must be > 0");
    }
    for (auto d : cfg.cnn_dims)
        if (d < 2) fail("cnn.dims entries must be >= 2");
    if (cfg.cnn.window > cfg.cnn_dims[0] * cfg.cnn_dims[1] * cfg.cnn_dims[2]) fail("cnn.window does not fit in cnn.dims");
    if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 0.5))
        fail("hybrid.validation_fraction must lie in (0, 0.5)");
    if (cfg.split && (cfg.split->train_len < 2 || cfg.split->test_len < 1)) fail("split needs train >= 2 and test >= 1");
}

nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["data"] = cfg.data;
    j["second_data"] = cfg.second_data;
    j["column"] = cfg.column;
    j["split"] = cfg.split ? nlohmann::json{cfg.split->train_len, cfg.split->test_len} : nlohmann::json("default");
    j["models"] = cfg.models;
    j["garch"] = {{"p", cfg.garch_p}, {"q", cfg.garch_q}};
    j["var"] = {{"order", cfg.var_order == 0 ? nlohmann::json("auto") : nlohmann::json(cfg.var_order)},
                {"max_p", cfg.var_max_p}};
    j["lstm"] = train_json(cfg.lstm);
    j["cnn"] = train_json(cfg.cnn);
    j["cnn"]["dims"] = cfg.cnn_dims;
    j["validation_fraction"] = cfg.validation_fraction;
    j["correlogram_lags"] = cfg.correlogram_lags;
    j["rolling"] = cfg.rolling;
    j["seed"] = cfg.seed;
    return j;
}

std::string config_hash(const RunConfig& cfg) {
    const std::string text = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace eqf::bench
