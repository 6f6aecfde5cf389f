#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "finlstm/ensemble/ensemble.hpp"
#include "finlstm/errors.hpp"
#include "finlstm/nn/hyper.hpp"

namespace finlstm::cli {

// Full run configuration. Defaults reproduce the reference setup: 11 members
// in canonical scheme order, 750/270/270 walk-forward blocks advancing 30
// days, 240-step sequences, threshold 8.
struct RunConfig {
    std::string prices_path;
    std::string risk_free_path; // optional; empty means a zero risk-free rate
    std::string out_dir = "out";

    nn::HyperParams hyper;
    std::size_t train_len = 750;
    std::size_t val_len = 270;
    std::size_t test_len = 270;
    std::size_t step = 30;

    int threshold = 8;
    double min_confidence = 0.5;
    std::uint64_t seed = 42;
    bool base_seed_set = false;
    std::uint64_t base_seed = 0; // defaults to `seed` unless set explicitly
    std::size_t jobs = 1;

    std::size_t synth_tickers = 10;
    std::size_t synth_days = 1320;
    double signal_strength = 0.8;

    std::vector<double> min_confidence_grid = {0.50, 0.55, 0.60, 0.65, 0.70,
                                               0.75, 0.80, 0.85, 0.90, 0.95};

    std::uint64_t effective_base_seed() const { return base_seed_set ? base_seed : seed; }

    ensemble::EnsembleConfig ensemble_config() const {
        ensemble::EnsembleConfig config;
        config.threshold = threshold;
        config.min_confidence = min_confidence;
        config.base_seed = effective_base_seed();
        config.hyper = hyper;
        return config;
    }

    // Everything checkable without touching input files.
    void validate_values() const {
        hyper.validate();
        ensemble_config().validate();
        if (train_len == 0 || val_len == 0 || test_len == 0 || step == 0) {
            throw ValidationError("train/val/test/step lengths must be positive");
        }
        if (train_len < hyper.seq_len + 1 || val_len < hyper.seq_len + 1) {
            throw ValidationError("train and validation windows must exceed seq_len");
        }
        if (test_len < hyper.seq_len + step) {
            throw ValidationError("test window must cover at least seq_len + step days");
        }
        if (jobs < 1) throw ValidationError("jobs must be >= 1");
        if (synth_tickers < 2) throw ValidationError("synth_tickers must be >= 2 (the median needs a cross-section)");
        if (synth_days < 2) throw ValidationError("synth_days must be >= 2");
        if (signal_strength < 0.0 || signal_strength > 1.0) {
            throw ValidationError("signal_strength must be in [0, 1]");
        }
        if (min_confidence_grid.empty()) throw ValidationError("min_confidence_grid is empty");
        for (double v : min_confidence_grid) {
            if (v < 0.5 || v >= 1.0) {
                throw ValidationError("min_confidence_grid values must be in [0.5, 1)");
            }
        }
    }

    void require_prices_file() const {
        if (prices_path.empty()) throw ValidationError("config key 'prices' is required");
        if (!std::filesystem::exists(prices_path)) {
            throw ValidationError("prices file not found: " + prices_path);
        }
        if (!risk_free_path.empty() && !std::filesystem::exists(risk_free_path)) {
            throw ValidationError("risk-free file not found: " + risk_free_path);
        }
    }
};

namespace detail {

inline std::string strip(std::string s) {
    auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

inline double to_double(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': not a number: '" + value + "'");
    }
}

inline std::uint64_t to_uint(const std::string& value, const std::string& key) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) {
        throw ValidationError("config key '" + key + "': not a non-negative integer: '" + value +
                              "'");
    }
    return v;
}

inline std::vector<double> to_double_list(const std::string& value, const std::string& key) {
    std::vector<double> values;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = strip(item);
        if (!item.empty()) values.push_back(to_double(item, key));
    }
    return values;
}

} // namespace detail

// Applies one `key = value` assignment; unknown keys are validation errors.
inline void apply_config_entry(RunConfig& config, const std::string& key,
                               const std::string& value) {
    if (key == "prices") config.prices_path = value;
    else if (key == "risk_free") config.risk_free_path = value;
    else if (key == "out_dir") config.out_dir = value;
    else if (key == "hidden_units") config.hyper.hidden_units = detail::to_uint(value, key);
    else if (key == "learning_rate") config.hyper.learning_rate = detail::to_double(value, key);
    else if (key == "dropout") config.hyper.dropout = detail::to_double(value, key);
    else if (key == "recurrent_dropout") config.hyper.recurrent_dropout = detail::to_double(value, key);
    else if (key == "batch_size") config.hyper.batch_size = detail::to_uint(value, key);
    else if (key == "max_epochs") config.hyper.max_epochs = detail::to_uint(value, key);
    else if (key == "patience") config.hyper.patience = detail::to_uint(value, key);
    else if (key == "seq_len") config.hyper.seq_len = detail::to_uint(value, key);
    else if (key == "train_len") config.train_len = detail::to_uint(value, key);
    else if (key == "val_len") config.val_len = detail::to_uint(value, key);
    else if (key == "test_len") config.test_len = detail::to_uint(value, key);
    else if (key == "step") config.step = detail::to_uint(value, key);
    else if (key == "threshold") config.threshold = static_cast<int>(detail::to_uint(value, key));
    else if (key == "min_confidence") config.min_confidence = detail::to_double(value, key);
    else if (key == "seed") config.seed = detail::to_uint(value, key);
    else if (key == "base_seed") {
        config.base_seed = detail::to_uint(value, key);
        config.base_seed_set = true;
    } else if (key == "jobs") config.jobs = detail::to_uint(value, key);
    else if (key == "synth_tickers") config.synth_tickers = detail::to_uint(value, key);
    else if (key == "synth_days") config.synth_days = detail::to_uint(value, key);
    else if (key == "signal_strength") config.signal_strength = detail::to_double(value, key);
    else if (key == "min_confidence_grid") config.min_confidence_grid = detail::to_double_list(value, key);
    else throw ValidationError("unknown config key '" + key + "'");
}

// Plain-text `key = value` file; '#' starts a comment, blank lines are
// ignored.
inline RunConfig parse_config(std::istream& in) {
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
        }
        const std::string key = detail::strip(line.substr(0, eq));
        const std::string value = detail::strip(line.substr(eq + 1));
        if (key.empty()) {
            throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
        }
        apply_config_entry(config, key, value);
    }
    return config;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    return parse_config(in);
}

} // namespace finlstm::cli
