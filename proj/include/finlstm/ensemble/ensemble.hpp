#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "finlstm/data/sequences.hpp"
#include "finlstm/data/tables.hpp"
#include "finlstm/ensemble/train.hpp"
#include "finlstm/errors.hpp"
#include "finlstm/nn/hyper.hpp"
#include "finlstm/nn/init.hpp"

namespace finlstm::ensemble {

inline constexpr std::size_t kMembers = nn::kSchemeCount; // 11

struct EnsembleConfig {
    std::array<nn::InitializerScheme, kMembers> member_schemes = nn::all_schemes();
    int threshold = 8;           // members that must agree before buying
    double min_confidence = 0.5; // per-member confidence floor on votes
    std::uint64_t base_seed = 42;
    nn::HyperParams hyper;

    void validate() const {
        hyper.validate();
        if (threshold < 1 || threshold > static_cast<int>(kMembers)) {
            throw ValidationError("threshold must be in [1, 11]");
        }
        if (min_confidence < 0.5 || min_confidence >= 1.0) {
            throw ValidationError("min_confidence must be in [0.5, 1)");
        }
    }
};

struct MemberOutput {
    std::string ticker;
    data::Date target_date;
    double confidence = 0.5;
    int member_index = 0;
};

struct EnsembleForecast {
    std::string ticker;
    data::Date target_date;
    int positive_votes = 0;
    bool buy = false;
};

struct AccuracyRecord {
    int member_index = 0;
    int block_index = 0;
    double test_accuracy = 0.0;
};

// Trains all members independently (member seed = base_seed + index), at most
// `jobs` at a time. Results do not depend on the degree of parallelism; each
// member owns its RNG and parameters. Member failures are rethrown with the
// member index, lowest index first.
inline std::vector<TrainResult> train_ensemble(const EnsembleConfig& config,
                                               std::span<const data::SequenceSample> train_samples,
                                               std::span<const data::SequenceSample> val_samples,
                                               std::size_t jobs = 1) {
    config.validate();
    if (jobs < 1) jobs = 1;
    jobs = std::min<std::size_t>(jobs, kMembers);

    std::vector<TrainResult> results(kMembers);
    std::array<std::exception_ptr, kMembers> failures{};
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= kMembers) return;
            try {
                results[i] = train_member(config.member_schemes[i], train_samples, val_samples,
                                          config.hyper, config.base_seed + i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(jobs);
        for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
    }

    for (std::size_t i = 0; i < kMembers; ++i) {
        if (failures[i]) {
            try {
                std::rethrow_exception(failures[i]);
            } catch (const std::exception& e) {
                throw std::runtime_error("member " + std::to_string(i) + " (" +
                                         std::string(nn::scheme_name(config.member_schemes[i])) +
                                         ") failed: " + e.what());
            }
        }
    }
    return results;
}

// Inference over a set of samples: one confidence per (member, sample),
// member-major, dropout off.
inline std::vector<MemberOutput> predict_members(
    std::span<const nn::LstmParameters> members,
    std::span<const data::SequenceSample> samples, std::size_t seq_len) {
    std::vector<MemberOutput> outputs;
    outputs.reserve(members.size() * samples.size());
    nn::ForwardCache cache;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (const auto& sample : samples) {
            if (sample.input.size() != seq_len) {
                throw std::invalid_argument("predict_members: sample length does not match seq_len");
            }
            MemberOutput out;
            out.ticker = sample.ticker;
            out.target_date = sample.target_date;
            out.member_index = static_cast<int>(i);
            out.confidence = nn::forward_predict(members[i], nn::SequenceView{sample.input, 1}, cache);
            outputs.push_back(std::move(out));
        }
    }
    return outputs;
}

// A member votes positive iff its confidence clears max(0.5, min_confidence);
// ties on the floor count as positive. Buy iff at least `threshold` members
// vote positive.
inline EnsembleForecast vote(std::span<const double> confidences, int threshold,
                             double min_confidence = 0.5) {
    if (confidences.size() != kMembers) {
        throw std::invalid_argument("vote: expected exactly 11 confidences");
    }
    const double floor = std::max(0.5, min_confidence);
    EnsembleForecast forecast;
    for (double c : confidences) {
        if (c >= floor) ++forecast.positive_votes;
    }
    forecast.buy = forecast.positive_votes >= threshold;
    return forecast;
}

// Per-day, per-ticker confidence vectors assembled from a member-output
// stream. Every (ticker, day) cell must receive exactly one output from each
// of the 11 members.
struct ConfidenceTable {
    std::map<data::Date, std::map<std::string, std::array<double, kMembers>>> cells;
};

inline ConfidenceTable build_confidence_table(std::span<const MemberOutput> outputs) {
    ConfidenceTable table;
    std::map<data::Date, std::map<std::string, std::array<bool, kMembers>>> seen;
    for (const auto& out : outputs) {
        if (out.member_index < 0 || out.member_index >= static_cast<int>(kMembers)) {
            throw std::invalid_argument("build_confidence_table: member index out of range");
        }
        auto& cell_seen = seen[out.target_date][out.ticker];
        if (cell_seen[out.member_index]) {
            throw std::runtime_error("duplicate member output for (" + out.target_date.to_string() +
                                     ", " + out.ticker + ", member " +
                                     std::to_string(out.member_index) + ")");
        }
        cell_seen[out.member_index] = true;
        table.cells[out.target_date][out.ticker][out.member_index] = out.confidence;
    }
    for (const auto& [date, row] : seen) {
        for (const auto& [ticker, flags] : row) {
            for (std::size_t i = 0; i < kMembers; ++i) {
                if (!flags[i]) {
                    throw std::runtime_error("missing member " + std::to_string(i) +
                                             " output for (" + date.to_string() + ", " + ticker +
                                             ")");
                }
            }
        }
    }
    return table;
}

// Re-votes the whole table at the given threshold/floor; forecasts ordered by
// date then ticker.
inline std::vector<EnsembleForecast> forecasts_from(const ConfidenceTable& table, int threshold,
                                                    double min_confidence = 0.5) {
    std::vector<EnsembleForecast> forecasts;
    for (const auto& [date, row] : table.cells) {
        for (const auto& [ticker, confidences] : row) {
            EnsembleForecast f = vote(confidences, threshold, min_confidence);
            f.ticker = ticker;
            f.target_date = date;
            forecasts.push_back(std::move(f));
        }
    }
    return forecasts;
}

// Fraction of outputs whose thresholded prediction (confidence >= 0.5)
// matches the label table. Throws if any (ticker, date) is missing.
inline double member_accuracy(std::span<const MemberOutput> outputs,
                              const data::LabelTable& labels) {
    if (outputs.empty()) throw std::invalid_argument("member_accuracy: no outputs");
    std::size_t matches = 0;
    for (const auto& out : outputs) {
        auto date_it = std::lower_bound(labels.dates.begin(), labels.dates.end(), out.target_date);
        if (date_it == labels.dates.end() || *date_it != out.target_date) {
            throw std::runtime_error("member_accuracy: no labels for date " +
                                     out.target_date.to_string());
        }
        auto ticker_it = std::find(labels.tickers.begin(), labels.tickers.end(), out.ticker);
        if (ticker_it == labels.tickers.end()) {
            throw std::runtime_error("member_accuracy: unknown ticker " + out.ticker);
        }
        const std::size_t d = static_cast<std::size_t>(date_it - labels.dates.begin());
        const std::size_t k = static_cast<std::size_t>(ticker_it - labels.tickers.begin());
        const bool predicted_above = out.confidence >= 0.5;
        if (predicted_above == (labels.at(d, k) != 0)) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(outputs.size());
}

} // namespace finlstm::ensemble
