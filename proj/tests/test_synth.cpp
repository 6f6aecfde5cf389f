#include <catch2/catch.hpp>

#include "finlstm/cli/reports.hpp"
#include "finlstm/data/synth.hpp"
#include "finlstm/data/tables.hpp"

using namespace finlstm;

TEST_CASE("same seed twice gives bit-identical tables") {
    data::SynthConfig config;
    config.n_days = 300;
    config.seed = 99;
    const auto a = data::synth_generate(config);
    const auto b = data::synth_generate(config);
    CHECK(a.prices.close == b.prices.close);
    CHECK(a.planted_truth.labels == b.planted_truth.labels);
    CHECK(cli::prices_csv_text(a.prices) == cli::prices_csv_text(b.prices));

    config.seed = 100;
    const auto c = data::synth_generate(config);
    CHECK(a.prices.close != c.prices.close);
}

TEST_CASE("generated prices are positive and returns stay above -1") {
    for (double s : {0.0, 0.5, 1.0}) {
        data::SynthConfig config;
        config.n_days = 1400;
        config.signal_strength = s;
        config.seed = 7;
        const auto result = data::synth_generate(config);
        for (double p : result.prices.close) CHECK(p > 0.0);
        const auto returns = data::compute_returns(result.prices);
        for (double r : returns.returns) {
            CHECK(r > -1.0);
            CHECK(std::abs(r) <= 0.5 + 1e-12);
        }
    }
}

TEST_CASE("signal_strength 0 is unpredictable: ~50% accuracy for a sign classifier") {
    data::SynthConfig config;
    config.n_days = 1400;
    config.signal_strength = 0.0;
    config.seed = 7;
    const auto result = data::synth_generate(config);
    const auto returns = data::compute_returns(result.prices);
    const auto labels = data::label_by_median(returns);
    std::size_t ok = 0, total = 0;
    for (std::size_t t = 0; t + 1 < returns.n_dates(); ++t) {
        for (std::size_t k = 0; k < returns.n_tickers(); ++k) {
            const int predicted = returns.at(t, k) > 0.0 ? 1 : 0;
            if (predicted == labels.at(t + 1, k)) ++ok;
            ++total;
        }
    }
    const double accuracy = static_cast<double>(ok) / static_cast<double>(total);
    CHECK(accuracy >= 0.45);
    CHECK(accuracy <= 0.55);
}

TEST_CASE("signal_strength 1 is predictable: one-step AR oracle beats 70%") {
    data::SynthConfig config;
    config.n_days = 1400;
    config.signal_strength = 1.0;
    config.seed = 7;
    const auto result = data::synth_generate(config);
    const auto returns = data::compute_returns(result.prices);
    std::size_t ok = 0, total = 0;
    for (std::size_t t = 0; t + 1 < returns.n_dates(); ++t) {
        for (std::size_t k = 0; k < returns.n_tickers(); ++k) {
            const double predicted = config.ar_coefficient * returns.at(t, k);
            if ((predicted > 0.0) == (returns.at(t + 1, k) > 0.0)) ++ok;
            ++total;
        }
    }
    CHECK(static_cast<double>(ok) / static_cast<double>(total) >= 0.70);
}

TEST_CASE("at signal_strength 1 the planted truth equals the realized labels") {
    data::SynthConfig config;
    config.n_days = 600;
    config.signal_strength = 1.0;
    config.seed = 3;
    const auto result = data::synth_generate(config);
    const auto labels = data::label_by_median(data::compute_returns(result.prices));
    REQUIRE(labels.labels.size() == result.planted_truth.labels.size());
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
        if (labels.labels[i] != result.planted_truth.labels[i]) ++mismatches;
    }
    // Prices quantize returns very slightly; knife-edge median flips must be rare.
    CHECK(static_cast<double>(mismatches) / labels.labels.size() < 0.005);
}

TEST_CASE("synth_generate validates its arguments") {
    data::SynthConfig config;
    config.n_tickers = 1;
    CHECK_THROWS_AS(data::synth_generate(config), std::invalid_argument);
    config.n_tickers = 3;
    config.signal_strength = 1.2;
    CHECK_THROWS_AS(data::synth_generate(config), std::invalid_argument);
    config.signal_strength = 0.5;
    config.n_days = 1;
    CHECK_THROWS_AS(data::synth_generate(config), std::invalid_argument);
}

TEST_CASE("weekday calendar: no Saturdays or Sundays") {
    data::SynthConfig config;
    config.n_days = 40;
    const auto result = data::synth_generate(config);
    for (const auto& d : result.prices.dates) {
        const int dow = static_cast<int>((d.serial() + 4) % 7);
        CHECK(dow != 0);
        CHECK(dow != 6);
    }
    for (std::size_t i = 1; i < result.prices.dates.size(); ++i) {
        CHECK(result.prices.dates[i - 1] < result.prices.dates[i]);
    }
}
