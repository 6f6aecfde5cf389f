#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "finlstm/backtest/ledger.hpp"
#include "finlstm/backtest/stats.hpp"
#include "finlstm/backtest/sweep.hpp"
#include "finlstm/cli/config.hpp"
#include "finlstm/cli/reports.hpp"
#include "finlstm/data/csv.hpp"
#include "finlstm/data/sequences.hpp"
#include "finlstm/data/synth.hpp"
#include "finlstm/ensemble/ensemble.hpp"
#include "finlstm/errors.hpp"
#include "finlstm/nn/checkpoint.hpp"

namespace finlstm::cli {

struct PreparedData {
    data::PriceTable prices;
    data::ReturnTable returns;
    data::LabelTable labels;
    data::BlockSchedule schedule;
};

inline PreparedData prepare_data(const RunConfig& config, std::ostream& log) {
    std::ifstream in(config.prices_path);
    if (!in) throw ValidationError("cannot open prices file: " + config.prices_path);
    std::vector<std::string> warnings;
    PreparedData prepared;
    prepared.prices = data::load_prices(in, &warnings);
    for (const auto& w : warnings) log << "warning: " << w << "\n";

    prepared.returns = data::compute_returns(prepared.prices);
    prepared.labels = data::label_by_median(prepared.returns);
    try {
        prepared.schedule = data::build_block_schedule(prepared.returns.n_dates(), config.train_len,
                                                       config.val_len, config.test_len, config.step);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    return prepared;
}

inline std::string checkpoint_dir(const RunConfig& config) {
    return (std::filesystem::path(config.out_dir) / "checkpoints").string();
}

inline std::string checkpoint_path(const RunConfig& config, std::size_t member_index,
                                   nn::InitializerScheme scheme, const data::Date& block_start) {
    char name[128];
    std::snprintf(name, sizeof(name), "member%02zu_%s_%s.ckpt", member_index,
                  std::string(nn::scheme_name(scheme)).c_str(), block_start.to_string().c_str());
    return (std::filesystem::path(checkpoint_dir(config)) / name).string();
}

namespace detail {

inline data::Date block_start_date(const PreparedData& prepared, const data::Block& block) {
    return prepared.returns.dates[block.train.begin];
}

// Test-range samples whose targets fall on the block's prediction days.
inline std::vector<data::SequenceSample> prediction_samples(const PreparedData& prepared,
                                                            const data::Block& block,
                                                            std::size_t seq_len) {
    auto samples = data::build_sequences(prepared.returns, prepared.labels, seq_len, block.test);
    const data::Date first_prediction = prepared.returns.dates[block.prediction.begin];
    std::erase_if(samples, [&](const data::SequenceSample& s) {
        return s.target_date < first_prediction;
    });
    return samples;
}

inline std::vector<nn::LstmParameters> load_block_members(const RunConfig& config,
                                                          const ensemble::EnsembleConfig& ens,
                                                          const data::Date& block_start) {
    std::vector<nn::LstmParameters> members;
    members.reserve(ensemble::kMembers);
    for (std::size_t i = 0; i < ensemble::kMembers; ++i) {
        const std::string path = checkpoint_path(config, i, ens.member_schemes[i], block_start);
        nn::Checkpoint ckpt = nn::load_checkpoint(path);
        if (ckpt.scheme != ens.member_schemes[i] ||
            ckpt.params.hidden_units() != ens.hyper.hidden_units) {
            throw std::runtime_error("checkpoint " + path + " does not match the run configuration");
        }
        members.push_back(std::move(ckpt.params));
    }
    return members;
}

inline std::vector<data::Date> prediction_dates(const PreparedData& prepared) {
    std::vector<data::Date> dates;
    for (const auto& block : prepared.schedule.blocks) {
        for (std::size_t d = block.prediction.begin; d < block.prediction.end; ++d) {
            dates.push_back(prepared.returns.dates[d]);
        }
    }
    return dates;
}

} // namespace detail

// Writes the synthetic price CSV, the planted ground-truth sidecar, and a
// manifest of the generator settings.
inline void cmd_synth(const RunConfig& config, std::ostream& log) {
    config.validate_values();
    std::filesystem::create_directories(config.out_dir);

    data::SynthConfig synth;
    synth.n_tickers = config.synth_tickers;
    synth.n_days = config.synth_days;
    synth.signal_strength = config.signal_strength;
    synth.seed = config.seed;
    const data::SynthResult result = data::synth_generate(synth);

    const auto dir = std::filesystem::path(config.out_dir);
    write_text_file((dir / "prices.csv").string(), prices_csv_text(result.prices));
    write_text_file((dir / "truth.csv").string(), truth_csv_text(result.planted_truth));

    std::ostringstream manifest;
    manifest << "generator = ar1-sign-persistent\n"
             << "n_tickers = " << synth.n_tickers << "\n"
             << "n_days = " << synth.n_days << "\n"
             << "signal_strength = " << fmt_double(synth.signal_strength) << "\n"
             << "seed = " << synth.seed << "\n"
             << "ar_coefficient = " << fmt_double(synth.ar_coefficient) << "\n"
             << "signal_vol = " << fmt_double(synth.signal_vol) << "\n"
             << "market_vol = " << fmt_double(synth.market_vol) << "\n"
             << "noise_vol = " << fmt_double(synth.noise_vol) << "\n";
    write_text_file((dir / "manifest.txt").string(), manifest.str());

    log << "synth: wrote " << synth.n_tickers << " tickers x " << synth.n_days << " days to "
        << config.out_dir << "\n";
}

struct TrainSummary {
    std::size_t blocks_total = 0;
    std::size_t blocks_trained = 0;
    std::size_t blocks_skipped = 0;
    std::vector<ensemble::AccuracyRecord> accuracy;
};

// Walk-forward training: per block, train the 11 members (unless that
// block's checkpoints already exist), persist checkpoints, and log per-member
// test accuracy over the block's prediction days.
inline TrainSummary cmd_train(const RunConfig& config, std::ostream& log) {
    config.validate_values();
    config.require_prices_file();
    const PreparedData prepared = prepare_data(config, log);
    const ensemble::EnsembleConfig ens = config.ensemble_config();

    std::filesystem::create_directories(checkpoint_dir(config));

    TrainSummary summary;
    summary.blocks_total = prepared.schedule.blocks.size();
    std::vector<data::Date> block_starts;

    for (std::size_t b = 0; b < prepared.schedule.blocks.size(); ++b) {
        const auto& block = prepared.schedule.blocks[b];
        const data::Date block_start = detail::block_start_date(prepared, block);
        block_starts.push_back(block_start);

        bool all_present = true;
        for (std::size_t i = 0; i < ensemble::kMembers; ++i) {
            if (!std::filesystem::exists(
                    checkpoint_path(config, i, ens.member_schemes[i], block_start))) {
                all_present = false;
                break;
            }
        }

        if (all_present) {
            ++summary.blocks_skipped;
            log << "block " << b << " (" << block_start.to_string()
                << "): checkpoints present, skipping training\n";
        } else {
            const auto train_samples =
                data::build_sequences(prepared.returns, prepared.labels, ens.hyper.seq_len, block.train);
            const auto val_samples = data::build_sequences(prepared.returns, prepared.labels,
                                                           ens.hyper.seq_len, block.validation);
            log << "block " << b << " (" << block_start.to_string() << "): training "
                << ensemble::kMembers << " members on " << train_samples.size() << " samples\n";
            const auto results = ensemble::train_ensemble(ens, train_samples, val_samples, config.jobs);
            for (std::size_t i = 0; i < ensemble::kMembers; ++i) {
                nn::Checkpoint ckpt;
                ckpt.scheme = ens.member_schemes[i];
                ckpt.seed = ens.base_seed + i;
                ckpt.params = results[i].params;
                nn::save_checkpoint(ckpt, checkpoint_path(config, i, ckpt.scheme, block_start));
            }
            ++summary.blocks_trained;
        }

        // Accuracy is always recomputed from the persisted checkpoints so that
        // resumed and fresh runs emit identical logs.
        const auto members = detail::load_block_members(config, ens, block_start);
        const auto test_samples = detail::prediction_samples(prepared, block, ens.hyper.seq_len);
        const auto outputs = ensemble::predict_members(members, test_samples, ens.hyper.seq_len);
        const std::size_t per_member = test_samples.size();
        for (std::size_t i = 0; i < ensemble::kMembers; ++i) {
            const std::span<const ensemble::MemberOutput> slice(outputs.data() + i * per_member,
                                                                per_member);
            ensemble::AccuracyRecord record;
            record.member_index = static_cast<int>(i);
            record.block_index = static_cast<int>(b);
            record.test_accuracy = ensemble::member_accuracy(slice, prepared.labels);
            summary.accuracy.push_back(record);
        }
    }

    write_text_file((std::filesystem::path(config.out_dir) / "accuracy_log.csv").string(),
                    accuracy_log_csv_text(summary.accuracy, block_starts, ens));
    log << "train: " << summary.blocks_trained << " block(s) trained, " << summary.blocks_skipped
        << " skipped, accuracy log written\n";
    return summary;
}

struct BacktestSummary {
    backtest::PortfolioLedger strategy;
    backtest::PortfolioLedger all_stock;
    backtest::PortfolioLedger random;
};

// Loads every block's checkpoints, persists the member confidences, votes at
// the configured threshold/floor, and writes ledgers, the report JSON, and
// the cumulative-return series for the strategy and both baselines.
inline BacktestSummary cmd_backtest(const RunConfig& config, std::ostream& log) {
    config.validate_values();
    config.require_prices_file();
    const PreparedData prepared = prepare_data(config, log);
    const ensemble::EnsembleConfig ens = config.ensemble_config();

    // Fail before any writes if a checkpoint is missing.
    for (std::size_t b = 0; b < prepared.schedule.blocks.size(); ++b) {
        const data::Date start = detail::block_start_date(prepared, prepared.schedule.blocks[b]);
        for (std::size_t i = 0; i < ensemble::kMembers; ++i) {
            const std::string path = checkpoint_path(config, i, ens.member_schemes[i], start);
            if (!std::filesystem::exists(path)) {
                throw ValidationError("missing checkpoint for block " + std::to_string(b) +
                                      " (start " + start.to_string() + "), member " +
                                      std::to_string(i) + " (" +
                                      std::string(nn::scheme_name(ens.member_schemes[i])) +
                                      "): " + path);
            }
        }
    }

    std::vector<ensemble::MemberOutput> all_outputs;
    for (std::size_t b = 0; b < prepared.schedule.blocks.size(); ++b) {
        const auto& block = prepared.schedule.blocks[b];
        const data::Date start = detail::block_start_date(prepared, block);
        const auto members = detail::load_block_members(config, ens, start);
        const auto samples = detail::prediction_samples(prepared, block, ens.hyper.seq_len);
        auto outputs = ensemble::predict_members(members, samples, ens.hyper.seq_len);
        all_outputs.insert(all_outputs.end(), std::make_move_iterator(outputs.begin()),
                           std::make_move_iterator(outputs.end()));
    }

    std::filesystem::create_directories(config.out_dir);
    const auto dir = std::filesystem::path(config.out_dir);
    write_text_file((dir / "member_outputs.csv").string(), member_outputs_csv_text(all_outputs));

    const auto table = ensemble::build_confidence_table(all_outputs);
    const auto forecasts = ensemble::forecasts_from(table, ens.threshold, ens.min_confidence);
    const auto days = detail::prediction_dates(prepared);

    BacktestSummary summary;
    summary.strategy = backtest::run_strategy(forecasts, prepared.returns, "lstm");
    summary.all_stock = backtest::all_stock_baseline(prepared.returns, days, "all_stock");
    summary.random = backtest::random_baseline(prepared.returns, days, config.seed, "random");

    data::RiskFreeSeries risk_free;
    if (!config.risk_free_path.empty()) {
        std::ifstream rf(config.risk_free_path);
        if (!rf) throw ValidationError("cannot open risk-free file: " + config.risk_free_path);
        risk_free = data::load_risk_free(rf);
    }

    write_text_file((dir / "ledger_lstm.csv").string(), ledger_csv_text(summary.strategy));
    write_text_file((dir / "ledger_all_stock.csv").string(), ledger_csv_text(summary.all_stock));
    write_text_file((dir / "ledger_random.csv").string(), ledger_csv_text(summary.random));
    write_text_file((dir / "cumulative_returns.csv").string(),
                    cumulative_csv_text(summary.strategy, summary.all_stock, summary.random));

    nlohmann::json report;
    report["lstm"] = portfolio_report_json(summary.strategy, risk_free);
    report["all_stock"] = portfolio_report_json(summary.all_stock, risk_free);
    report["random"] = portfolio_report_json(summary.random, risk_free);
    write_text_file((dir / "report.json").string(), report.dump(2) + "\n");

    for (const auto* ledger : {&summary.strategy, &summary.all_stock, &summary.random}) {
        const auto stats = backtest::daily_stats(*ledger);
        log << "backtest: " << ledger->name << " mean daily return "
            << fmt_double(stats.mean_percent) << "% over " << stats.n_days << " day(s)\n";
    }
    return summary;
}

// Re-votes persisted member outputs over a threshold or confidence-floor grid
// and writes one sweep CSV. No retraining happens here.
inline std::vector<backtest::SweepRow> cmd_sweep(const RunConfig& config,
                                                 const std::string& variable, std::ostream& log) {
    config.validate_values();
    if (variable != "threshold" && variable != "min_confidence") {
        throw ValidationError("unknown sweep variable '" + variable +
                              "'; valid names: threshold, min_confidence");
    }
    config.require_prices_file();
    const std::string outputs_path =
        (std::filesystem::path(config.out_dir) / "member_outputs.csv").string();
    if (!std::filesystem::exists(outputs_path)) {
        throw ValidationError("member outputs not found (run backtest first): " + outputs_path);
    }

    const PreparedData prepared = prepare_data(config, log);
    const auto outputs = read_member_outputs(outputs_path);
    const auto table = ensemble::build_confidence_table(outputs);

    std::vector<backtest::SweepRow> rows;
    if (variable == "threshold") {
        rows = backtest::sweep_threshold(table, prepared.returns, config.min_confidence);
    } else {
        rows = backtest::sweep_min_confidence(table, prepared.returns, config.threshold,
                                              config.min_confidence_grid);
    }
    write_text_file(
        (std::filesystem::path(config.out_dir) / ("sweep_" + variable + ".csv")).string(),
        sweep_csv_text(rows));
    log << "sweep: wrote " << rows.size() << " row(s) for variable " << variable << "\n";
    return rows;
}

} // namespace finlstm::cli
