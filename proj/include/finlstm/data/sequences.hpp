#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "finlstm/data/tables.hpp"

namespace finlstm::data {

// Half-open range of day indices into a ReturnTable.
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t length() const { return end - begin; }
};

// One training/evaluation sample: a fixed-length window of one ticker's
// returns and the next day's above/below-median target.
struct SequenceSample {
    std::string ticker;
    std::vector<double> input; // seq_len returns, oldest first
    std::uint8_t target = 0;
    Date target_date;
};

// Builds stride-1 samples for every ticker from days inside `range` only
// (both the input window and the target day). With a too-short range the
// result is empty and a warning is appended if a sink is given.
inline std::vector<SequenceSample> build_sequences(const ReturnTable& returns,
                                                   const LabelTable& labels, std::size_t seq_len,
                                                   IndexRange range,
                                                   std::vector<std::string>* warnings = nullptr) {
    if (seq_len < 1) throw std::invalid_argument("build_sequences: seq_len must be >= 1");
    if (range.end > returns.n_dates() || range.begin > range.end) {
        throw std::invalid_argument("build_sequences: range out of bounds");
    }
    if (labels.dates.size() != returns.n_dates() || labels.tickers != returns.tickers) {
        throw std::invalid_argument("build_sequences: label table does not match return table");
    }

    std::vector<SequenceSample> samples;
    if (range.length() < seq_len + 1) {
        if (warnings) {
            warnings->push_back("range of " + std::to_string(range.length()) +
                                " days is too short for sequences of length " +
                                std::to_string(seq_len) + "; no samples built");
        }
        return samples;
    }

    samples.reserve(returns.n_tickers() * (range.length() - seq_len));
    for (std::size_t k = 0; k < returns.n_tickers(); ++k) {
        // Last input day t runs so that the target day t+1 stays inside range.
        for (std::size_t t = range.begin + seq_len - 1; t + 1 < range.end; ++t) {
            SequenceSample sample;
            sample.ticker = returns.tickers[k];
            sample.input.resize(seq_len);
            for (std::size_t j = 0; j < seq_len; ++j) {
                sample.input[j] = returns.at(t + 1 - seq_len + j, k);
            }
            sample.target = labels.at(t + 1, k);
            sample.target_date = returns.dates[t + 1];
            samples.push_back(std::move(sample));
        }
    }
    return samples;
}

inline std::vector<SequenceSample> build_sequences(const ReturnTable& returns,
                                                   const LabelTable& labels, std::size_t seq_len,
                                                   std::vector<std::string>* warnings = nullptr) {
    return build_sequences(returns, labels, seq_len, IndexRange{0, returns.n_dates()}, warnings);
}

// One walk-forward block: train/validation/test day ranges plus the 30 (i.e.
// `step`) prediction days at the tail of the test range.
struct Block {
    IndexRange train;
    IndexRange validation;
    IndexRange test;
    IndexRange prediction; // last `step` days of test
};

struct BlockSchedule {
    std::vector<Block> blocks;
    std::size_t train_len = 0, val_len = 0, test_len = 0, step = 0;
};

// Blocks start at day 0 and advance by `step` while a full
// train+validation+test window fits.
inline BlockSchedule build_block_schedule(std::size_t n_days, std::size_t train_len = 750,
                                          std::size_t val_len = 270, std::size_t test_len = 270,
                                          std::size_t step = 30) {
    if (train_len == 0 || val_len == 0 || test_len == 0 || step == 0) {
        throw std::invalid_argument("build_block_schedule: lengths must be positive");
    }
    const std::size_t block_len = train_len + val_len + test_len;
    if (test_len < step) {
        throw std::invalid_argument("build_block_schedule: test window shorter than step");
    }
    if (n_days < block_len) {
        throw std::invalid_argument("build_block_schedule: need at least " +
                                    std::to_string(block_len) + " days, got " +
                                    std::to_string(n_days));
    }

    BlockSchedule schedule;
    schedule.train_len = train_len;
    schedule.val_len = val_len;
    schedule.test_len = test_len;
    schedule.step = step;
    for (std::size_t a = 0; a + block_len <= n_days; a += step) {
        Block block;
        block.train = {a, a + train_len};
        block.validation = {a + train_len, a + train_len + val_len};
        block.test = {a + train_len + val_len, a + block_len};
        block.prediction = {a + block_len - step, a + block_len};
        schedule.blocks.push_back(block);
    }
    return schedule;
}

} // namespace finlstm::data
