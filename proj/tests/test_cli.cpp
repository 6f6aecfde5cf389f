#include <catch2/catch.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "finlstm/cli/config.hpp"
#include "finlstm/cli/pipeline.hpp"
#include "finlstm/cli/reports.hpp"

using namespace finlstm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Desk-scale config: tiny blocks, tiny model, two walk-forward steps.
cli::RunConfig tiny_config(const fs::path& dir) {
    cli::RunConfig config;
    config.out_dir = dir.string();
    config.prices_path = (dir / "prices.csv").string();
    config.seed = 5;
    config.synth_tickers = 4;
    config.synth_days = 112; // 111 return days -> 2 blocks of length 105, step 5
    config.signal_strength = 0.9;
    config.hyper.hidden_units = 2;
    config.hyper.seq_len = 10;
    config.hyper.batch_size = 64;
    config.hyper.max_epochs = 2;
    config.hyper.patience = 2;
    config.train_len = 60;
    config.val_len = 20;
    config.test_len = 25;
    config.step = 5;
    config.threshold = 6;
    return config;
}

} // namespace

TEST_CASE("config parsing: defaults, overrides, comments") {
    std::istringstream in("# comment line\n"
                          "prices = data/p.csv\n"
                          "threshold = 9\n"
                          "learning_rate = 0.001  # trailing comment\n"
                          "min_confidence_grid = 0.5, 0.6, 0.7\n"
                          "\n"
                          "base_seed = 17\n");
    const auto config = cli::parse_config(in);
    CHECK(config.prices_path == "data/p.csv");
    CHECK(config.threshold == 9);
    CHECK(config.hyper.learning_rate == 0.001);
    CHECK(config.min_confidence_grid == std::vector<double>{0.5, 0.6, 0.7});
    CHECK(config.base_seed_set);
    CHECK(config.effective_base_seed() == 17);
    // untouched defaults
    CHECK(config.hyper.hidden_units == 3);
    CHECK(config.hyper.dropout == 0.06);
    CHECK(config.hyper.recurrent_dropout == 0.14);
    CHECK(config.hyper.batch_size == 6800);
    CHECK(config.hyper.seq_len == 240);
    CHECK(config.train_len == 750);
    CHECK(config.val_len == 270);
    CHECK(config.test_len == 270);
    CHECK(config.step == 30);
}

TEST_CASE("config errors are validation errors") {
    {
        std::istringstream in("no_such_key = 1\n");
        CHECK_THROWS_AS(cli::parse_config(in), ValidationError);
    }
    {
        std::istringstream in("threshold = abc\n");
        CHECK_THROWS_AS(cli::parse_config(in), ValidationError);
    }
    {
        std::istringstream in("threshold 9\n");
        CHECK_THROWS_AS(cli::parse_config(in), ValidationError);
    }
}

TEST_CASE("config value validation is fail-fast") {
    cli::RunConfig config;
    config.threshold = 12;
    CHECK_THROWS_AS(config.validate_values(), ValidationError);
    config = {};
    config.synth_tickers = 1;
    CHECK_THROWS_AS(config.validate_values(), ValidationError);
    config = {};
    config.hyper.seq_len = 300; // test window no longer covers seq_len + step
    CHECK_THROWS_AS(config.validate_values(), ValidationError);
    config = {};
    config.min_confidence = 0.3;
    CHECK_THROWS_AS(config.validate_values(), ValidationError);
}

TEST_CASE("base_seed defaults to seed until set") {
    cli::RunConfig config;
    config.seed = 123;
    CHECK(config.effective_base_seed() == 123);
    cli::apply_config_entry(config, "base_seed", "9");
    CHECK(config.effective_base_seed() == 9);
}

TEST_CASE("synth command writes deterministic files") {
    const fs::path dir = fs::temp_directory_path() / "finlstm_test_synth";
    fs::remove_all(dir);
    auto config = tiny_config(dir);
    std::ostringstream log;
    cli::cmd_synth(config, log);
    REQUIRE(fs::exists(dir / "prices.csv"));
    REQUIRE(fs::exists(dir / "truth.csv"));
    REQUIRE(fs::exists(dir / "manifest.txt"));

    const std::string prices_a = slurp(dir / "prices.csv");
    const std::string truth_a = slurp(dir / "truth.csv");
    cli::cmd_synth(config, log);
    CHECK(slurp(dir / "prices.csv") == prices_a);
    CHECK(slurp(dir / "truth.csv") == truth_a);

    // Row count: header + n_days * n_tickers.
    const std::size_t rows = std::count(prices_a.begin(), prices_a.end(), '\n');
    CHECK(rows == 1 + config.synth_days * config.synth_tickers);

    // The written CSV loads back into an identical table.
    std::ifstream in(dir / "prices.csv");
    const auto table = data::load_prices(in);
    CHECK(table.n_dates() == config.synth_days);
    CHECK(table.n_tickers() == config.synth_tickers);
    fs::remove_all(dir);
}

TEST_CASE("train, backtest, and sweep compose on a tiny pipeline") {
    const fs::path dir = fs::temp_directory_path() / "finlstm_test_pipeline";
    fs::remove_all(dir);
    auto config = tiny_config(dir);
    std::ostringstream log;
    cli::cmd_synth(config, log);

    const auto summary = cli::cmd_train(config, log);
    CHECK(summary.blocks_total == 2);
    CHECK(summary.blocks_trained == 2);
    CHECK(summary.blocks_skipped == 0);
    CHECK(summary.accuracy.size() == 2 * ensemble::kMembers);
    REQUIRE(fs::exists(dir / "accuracy_log.csv"));
    const std::string accuracy_a = slurp(dir / "accuracy_log.csv");

    // Rerun: everything is skipped, outputs identical.
    const auto rerun = cli::cmd_train(config, log);
    CHECK(rerun.blocks_trained == 0);
    CHECK(rerun.blocks_skipped == 2);
    CHECK(slurp(dir / "accuracy_log.csv") == accuracy_a);

    const auto backtest_summary = cli::cmd_backtest(config, log);
    for (const char* name : {"member_outputs.csv", "ledger_lstm.csv", "ledger_all_stock.csv",
                             "ledger_random.csv", "cumulative_returns.csv", "report.json"}) {
        REQUIRE(fs::exists(dir / name));
    }
    // Each block contributes `step` prediction days.
    CHECK(backtest_summary.strategy.entries.size() == 2 * config.step);
    CHECK(backtest_summary.all_stock.entries.size() == 2 * config.step);

    // Ledger CSV is deterministic across reruns.
    const std::string ledger_a = slurp(dir / "ledger_lstm.csv");
    cli::cmd_backtest(config, log);
    CHECK(slurp(dir / "ledger_lstm.csv") == ledger_a);

    // Report JSON parses and has the three portfolios.
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    for (const char* name : {"lstm", "all_stock", "random"}) {
        REQUIRE(report.contains(name));
        CHECK(report[name].contains("overall"));
        CHECK(report[name].contains("yearly"));
        CHECK(report[name].contains("risk"));
    }

    // Sweeps re-vote without retraining.
    const auto threshold_rows = cli::cmd_sweep(config, "threshold", log);
    CHECK(threshold_rows.size() == 11);
    REQUIRE(fs::exists(dir / "sweep_threshold.csv"));
    const auto floor_rows = cli::cmd_sweep(config, "min_confidence", log);
    CHECK(floor_rows.size() == config.min_confidence_grid.size());
    CHECK_THROWS_WITH(cli::cmd_sweep(config, "volatility", log), Catch::Contains("threshold"));

    // Missing checkpoint: remove one file, backtest must name block and member.
    fs::path removed;
    for (const auto& entry : fs::directory_iterator(dir / "checkpoints")) {
        if (entry.path().filename().string().rfind("member03", 0) == 0) {
            removed = entry.path();
            break;
        }
    }
    REQUIRE(!removed.empty());
    fs::remove(removed);
    CHECK_THROWS_WITH(cli::cmd_backtest(config, log), Catch::Contains("member 3"));

    // Corrupt checkpoint: train skips the block only if files parse.
    {
        std::ofstream out(removed);
        out << "garbage\n";
    }
    CHECK_THROWS_WITH(cli::cmd_train(config, log), Catch::Contains(removed.filename().string()));
    fs::remove_all(dir);
}

TEST_CASE("all-zero checkpoints make the strategy ledger equal the all-stock ledger") {
    // Zero parameters give confidence exactly 0.5 for every ticker; the >=
    // vote rule then counts 11 positives everywhere, so every ticker is
    // bought every day.
    const fs::path dir = fs::temp_directory_path() / "finlstm_test_zero_ckpt";
    fs::remove_all(dir);
    auto config = tiny_config(dir);
    std::ostringstream log;
    cli::cmd_synth(config, log);
    cli::cmd_train(config, log);

    // Overwrite every persisted checkpoint with zero parameters.
    const auto ens = config.ensemble_config();
    for (const auto& entry : fs::directory_iterator(dir / "checkpoints")) {
        const auto existing = nn::load_checkpoint(entry.path().string());
        nn::Checkpoint zero;
        zero.scheme = existing.scheme;
        zero.seed = existing.seed;
        zero.params = nn::LstmParameters(ens.hyper.hidden_units, 1);
        nn::save_checkpoint(zero, entry.path().string());
    }

    const auto summary = cli::cmd_backtest(config, log);
    REQUIRE(summary.strategy.entries.size() == summary.all_stock.entries.size());
    for (std::size_t i = 0; i < summary.strategy.entries.size(); ++i) {
        CHECK(summary.strategy.entries[i].date == summary.all_stock.entries[i].date);
        CHECK(summary.strategy.entries[i].holdings == summary.all_stock.entries[i].holdings);
        CHECK(summary.strategy.entries[i].daily_return ==
              summary.all_stock.entries[i].daily_return);
        CHECK(summary.strategy.entries[i].cumulative_return ==
              summary.all_stock.entries[i].cumulative_return);
    }
    fs::remove_all(dir);
}

TEST_CASE("deleting all outputs and rerunning reproduces them byte for byte") {
    const fs::path dir = fs::temp_directory_path() / "finlstm_test_replay";
    fs::remove_all(dir);
    auto config = tiny_config(dir);
    std::ostringstream log;

    auto run_all = [&]() {
        cli::cmd_synth(config, log);
        cli::cmd_train(config, log);
        cli::cmd_backtest(config, log);
    };
    run_all();
    std::map<std::string, std::string> first;
    for (const char* name : {"prices.csv", "accuracy_log.csv", "member_outputs.csv",
                             "ledger_lstm.csv", "ledger_random.csv", "report.json"}) {
        first[name] = slurp(dir / name);
    }
    fs::remove_all(dir);
    run_all();
    for (const auto& [name, contents] : first) {
        CHECK(slurp(dir / name) == contents);
    }
    fs::remove_all(dir);
}

TEST_CASE("flags beat config values") {
    const fs::path dir = fs::temp_directory_path() / "finlstm_test_flags";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = FINLSTM_CLI_PATH;
    {
        std::ofstream cfg(dir / "f.cfg");
        cfg << "synth_tickers = 3\nsynth_days = 25\nseed = 5\n";
    }
    auto synth_to = [&](const std::string& out, const std::string& extra) {
        const std::string command = cli + " synth --config " + (dir / "f.cfg").string() +
                                    " --out " + (dir / out).string() + " " + extra +
                                    " >/dev/null 2>&1";
        REQUIRE(std::system(command.c_str()) == 0);
        return slurp(dir / out / "prices.csv");
    };
    const std::string base = synth_to("a", "");
    const std::string same = synth_to("b", "--seed 5");
    const std::string flagged = synth_to("c", "--seed 6");
    CHECK(base == same);
    CHECK(base != flagged);
    fs::remove_all(dir);
}

TEST_CASE("hyperparameter ranges are validated") {
    cli::RunConfig config;
    config.hyper.dropout = 1.0;
    CHECK_THROWS_AS(config.validate_values(), ValidationError);
    config = {};
    config.hyper.recurrent_dropout = -0.1;
    CHECK_THROWS_AS(config.validate_values(), ValidationError);
    config = {};
    config.hyper.learning_rate = 0.0;
    CHECK_THROWS_AS(config.validate_values(), ValidationError);
}

TEST_CASE("member outputs round-trip through CSV bit-exactly") {
    const fs::path dir = fs::temp_directory_path() / "finlstm_test_outputs";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<ensemble::MemberOutput> outputs;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int day = 0; day < 3; ++day) {
        for (const char* ticker : {"AAA", "BBB"}) {
            for (int member = 0; member < 11; ++member) {
                ensemble::MemberOutput out;
                out.target_date = data::Date(2020, 1, 2 + day);
                out.ticker = ticker;
                out.member_index = member;
                out.confidence = uniform(rng);
                outputs.push_back(out);
            }
        }
    }
    const auto path = dir / "member_outputs.csv";
    cli::write_text_file(path.string(), cli::member_outputs_csv_text(outputs));
    const auto loaded = cli::read_member_outputs(path.string());
    REQUIRE(loaded.size() == outputs.size());
    const auto table_a = ensemble::build_confidence_table(outputs);
    const auto table_b = ensemble::build_confidence_table(loaded);
    for (const auto& [date, row] : table_a.cells) {
        for (const auto& [ticker, confidences] : row) {
            const auto& other = table_b.cells.at(date).at(ticker);
            for (std::size_t i = 0; i < confidences.size(); ++i) {
                CHECK(confidences[i] == other[i]);
            }
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("the CLI binary maps error classes to exit codes") {
    const fs::path dir = fs::temp_directory_path() / "finlstm_test_cli_bin";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = FINLSTM_CLI_PATH;

    auto run = [&](const std::string& args) {
        const std::string command = cli + " " + args + " >" + (dir / "stdout.txt").string() +
                                    " 2>" + (dir / "stderr.txt").string();
        const int status = std::system(command.c_str());
        return WEXITSTATUS(status);
    };

    // Validation failure: synth with one ticker.
    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "synth_tickers = 1\n";
    }
    CHECK(run("synth --config " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string()) == 1);

    // Unknown sweep variable.
    {
        std::ofstream cfg(dir / "ok.cfg");
        cfg << "synth_tickers = 4\nsynth_days = 30\n";
    }
    CHECK(run("sweep --variable nope --config " + (dir / "ok.cfg").string()) == 1);

    // Missing prices file: validation error.
    CHECK(run("train --config " + (dir / "ok.cfg").string()) == 1);

    // Happy path: synth exits 0 and writes files.
    CHECK(run("synth --config " + (dir / "ok.cfg").string() + " --out " + (dir / "o").string()) == 0);
    CHECK(fs::exists(dir / "o" / "prices.csv"));

    // Unknown flag is a usage (validation) error.
    CHECK(run("synth --nope") == 1);
    fs::remove_all(dir);
}

TEST_CASE("FINLSTM_OUT_DIR overrides the configured output directory") {
    const fs::path dir = fs::temp_directory_path() / "finlstm_test_env";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = FINLSTM_CLI_PATH;
    {
        std::ofstream cfg(dir / "env.cfg");
        cfg << "synth_tickers = 3\nsynth_days = 20\nout_dir = " << (dir / "from_config").string()
            << "\n";
    }
    const std::string command = "FINLSTM_OUT_DIR=" + (dir / "from_env").string() + " " + cli +
                                " synth --config " + (dir / "env.cfg").string() + " >/dev/null 2>&1";
    REQUIRE(std::system(command.c_str()) == 0);
    CHECK(fs::exists(dir / "from_env" / "prices.csv"));
    CHECK_FALSE(fs::exists(dir / "from_config" / "prices.csv"));
    fs::remove_all(dir);
}
