#include <catch2/catch.hpp>

#include "finlstm/nn/gradcheck.hpp"
#include "test_util.hpp"

using namespace finlstm;

TEST_CASE("BPTT matches central differences on random instances") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t m = 1 + trial % 4;
        const std::size_t steps = 3 + trial % 10;
        const auto params = testutil::random_params(m, 1, 500 + trial, 0.7);
        const auto seq = testutil::random_sequence(steps, 600 + trial);
        const double label = uniform(rng) < 0.5 ? 0.0 : 1.0;
        const auto report =
            nn::gradient_check(params, nn::SequenceView{seq, 1}, label, 1e-5, 1e-4);
        INFO("trial " << trial << " max rel err " << report.max_relative_error);
        CHECK(report.passed);
    }
}

TEST_CASE("reference instance m=3 n=1 T=10") {
    const auto params = testutil::random_params(3, 1, 42, 0.7);
    const auto seq = testutil::random_sequence(10, 42);
    const auto report = nn::gradient_check(params, nn::SequenceView{seq, 1}, 1.0, 1e-5, 1e-4);
    CHECK(report.passed);
    CHECK(report.max_relative_error < 1e-4);
    CHECK(report.blocks.size() == 14);
}

TEST_CASE("gradient check works with multiple input features") {
    const auto params = testutil::random_params(3, 2, 77, 0.6);
    const auto seq = testutil::random_sequence(12, 78); // 6 steps x 2 features
    const auto report = nn::gradient_check(params, nn::SequenceView{seq, 2}, 0.0, 1e-5, 1e-4);
    CHECK(report.passed);
}

TEST_CASE("all-zero parameters pass trivially") {
    nn::LstmParameters params(3, 1);
    const auto seq = testutil::random_sequence(6, 9);
    const auto report = nn::gradient_check(params, nn::SequenceView{seq, 1}, 1.0, 1e-5, 1e-4);
    CHECK(report.passed);
}

TEST_CASE("zero tolerance flags floating-point noise") {
    const auto params = testutil::random_params(3, 1, 11, 0.7);
    const auto seq = testutil::random_sequence(10, 12);
    const auto report = nn::gradient_check(params, nn::SequenceView{seq, 1}, 1.0, 1e-5, 0.0);
    CHECK_FALSE(report.passed);
    bool any_flagged = false;
    for (const auto& block : report.blocks) any_flagged |= block.flagged;
    CHECK(any_flagged);
}
