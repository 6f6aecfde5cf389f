// Command-line front end: synthetic data generation, walk-forward ensemble
// training, backtesting, and threshold / confidence-floor sweeps.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "finlstm/finlstm.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threshold = 0;
    double min_confidence = 0.0;
    std::size_t jobs = 0;

    CLI::Option* config_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threshold_opt = nullptr;
    CLI::Option* min_confidence_opt = nullptr;
    CLI::Option* jobs_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    flags.config_opt = cmd->add_option("--config", flags.config_path, "Path to a key=value config file");
    flags.out_opt = cmd->add_option("--out", flags.out_dir, "Output directory");
    flags.seed_opt = cmd->add_option("--seed", flags.seed, "Seed for data generation and baselines");
    flags.threshold_opt =
        cmd->add_option("--threshold", flags.threshold, "Votes required before buying (1..11)");
    flags.min_confidence_opt =
        cmd->add_option("--min-confidence", flags.min_confidence, "Per-member confidence floor");
    flags.jobs_opt = cmd->add_option("--jobs", flags.jobs, "Parallel member-training jobs");
}

// Precedence: defaults < config file < FINLSTM_OUT_DIR (output dir only) < flags.
finlstm::cli::RunConfig resolve_config(const CommonFlags& flags) {
    finlstm::cli::RunConfig config;
    if (flags.config_opt->count() > 0) config = finlstm::cli::load_config(flags.config_path);
    if (const char* env_out = std::getenv("FINLSTM_OUT_DIR"); env_out && *env_out) {
        config.out_dir = env_out;
    }
    if (flags.out_opt->count() > 0) config.out_dir = flags.out_dir;
    if (flags.seed_opt->count() > 0) config.seed = flags.seed;
    if (flags.threshold_opt->count() > 0) config.threshold = flags.threshold;
    if (flags.min_confidence_opt->count() > 0) config.min_confidence = flags.min_confidence;
    if (flags.jobs_opt->count() > 0) config.jobs = flags.jobs;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSTM ensemble stock classifier and backtester"};
    app.require_subcommand(1);

    CommonFlags synth_flags, train_flags, backtest_flags, sweep_flags;
    std::string sweep_variable;

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic price CSV with a planted signal");
    add_common_flags(synth, synth_flags);
    CLI::App* train = app.add_subcommand("train", "Train the 11-member ensemble per walk-forward block");
    add_common_flags(train, train_flags);
    CLI::App* backtest =
        app.add_subcommand("backtest", "Vote, trade, and report against the baselines");
    add_common_flags(backtest, backtest_flags);
    CLI::App* sweep = app.add_subcommand("sweep", "Re-vote persisted member outputs over a grid");
    add_common_flags(sweep, sweep_flags);
    sweep->add_option("--variable", sweep_variable, "Grid variable: threshold or min_confidence")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // bad usage is a validation error
    }

    try {
        if (synth->parsed()) {
            finlstm::cli::cmd_synth(resolve_config(synth_flags), std::cout);
        } else if (train->parsed()) {
            finlstm::cli::cmd_train(resolve_config(train_flags), std::cout);
        } else if (backtest->parsed()) {
            finlstm::cli::cmd_backtest(resolve_config(backtest_flags), std::cout);
        } else if (sweep->parsed()) {
            finlstm::cli::cmd_sweep(resolve_config(sweep_flags), sweep_variable, std::cout);
        }
    } catch (const finlstm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
