#pragma once

#include "eqf/neural/models.hpp"
#include "eqf/timeseries.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace eqf::bench {

inline const std::vector<std::string> kKnownModels{"garch", "var", "lstm", "cnn"};

struct RunConfig {
    std::string data;
    std::string second_data;
    std::string column = "adj_close";
    std::optional<SplitSpec> split;  // default_split() when absent
    std::vector<std::string> models{"garch", "lstm"};

    std::size_t garch_p = 1;
    std::size_t garch_q = 1;

    std::size_t var_order = 0;  // 0 selects by AIC up to var_max_p
    std::size_t var_max_p = 12;

    nn::TrainConfig lstm{};
    nn::TrainConfig cnn{100, 27, 32, 2, 1e-3};
    nn::Dims3 cnn_dims{3, 3, 3};

    double validation_fraction = 0.1;  // tail of training held out for hybrid weights
    std::size_t correlogram_lags = 20;
    bool rolling = false;
    std::uint64_t seed = 1;

    std::string out = "eqf_out";

    bool enabled(const std::string& model) const;
};

// Applies one key=value setting. Throws ConfigError for unknown keys or malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Plain text: one key=value per line, '#' starts a comment, blank lines ignored.
RunConfig load_config(const std::filesystem::path& path);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

// `--seed N` sets the global seed and every model seed derived from it.
void set_seed(RunConfig& cfg, std::uint64_t seed);

SplitSpec parse_split(const std::string& text);
std::vector<std::string> parse_models(const std::string& text);

// Throws ConfigError when no model is enabled, a model name is unknown, VAR lacks the second
// series, or a hyperparameter is out of range.
void validate(const RunConfig& cfg);

// Everything that influences results; the output directory is left out.
nlohmann::json to_json(const RunConfig& cfg);

// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace eqf::bench
