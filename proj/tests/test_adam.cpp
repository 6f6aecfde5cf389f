#include <catch2/catch.hpp>

#include <cmath>
#include <limits>

#include "finlstm/nn/adam.hpp"
#include "test_util.hpp"

using namespace finlstm;

TEST_CASE("zero gradients leave parameters untouched") {
    auto params = testutil::random_params(3, 1, 4);
    const auto before = params;
    nn::Gradients grads(3, 1);
    nn::AdamState state(3, 1);
    nn::adam_step(params, grads, state, 0.0075);
    auto a = nn::parameter_blocks(before);
    auto b = nn::parameter_blocks(params);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < a[i].values.size(); ++k) {
            CHECK(b[i].values[k] == a[i].values[k]);
        }
    }
    CHECK(state.step == 1);
}

TEST_CASE("first step matches the bias-corrected closed form") {
    // After bias correction the first update is lr * g / (|g| + eps),
    // i.e. almost exactly lr * sign(g).
    nn::LstmParameters params(1, 1);
    nn::Gradients grads(1, 1);
    nn::AdamState state(1, 1);
    const double g = -0.37;
    grads.b_out = g;
    const double lr = 0.01;
    nn::adam_step(params, grads, state, lr);
    const double expected = -lr * g / (std::abs(g) + state.epsilon);
    CHECK(params.b_out == Approx(expected).margin(1e-15));
    CHECK(params.b_out == Approx(lr).epsilon(1e-6)); // ~ -lr * sign(g)
}

TEST_CASE("constant gradient keeps update magnitudes non-increasing") {
    nn::LstmParameters params(1, 1);
    nn::Gradients grads(1, 1);
    nn::AdamState state(1, 1);
    grads.b_out = 0.25;
    const double lr = 0.002;

    double previous = params.b_out;
    nn::adam_step(params, grads, state, lr);
    const double first_update = std::abs(params.b_out - previous);
    previous = params.b_out;
    nn::adam_step(params, grads, state, lr);
    const double second_update = std::abs(params.b_out - previous);
    CHECK(second_update <= first_update + 1e-9);
}

TEST_CASE("second moments stay non-negative and the step counter advances") {
    auto params = testutil::random_params(2, 1, 6);
    nn::AdamState state(2, 1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (int step = 1; step <= 5; ++step) {
        nn::Gradients grads(2, 1);
        for (auto& block : nn::parameter_blocks(grads)) {
            for (double& v : block.values) v = uniform(rng);
        }
        nn::adam_step(params, grads, state, 0.01);
        CHECK(state.step == static_cast<std::uint64_t>(step));
        for (const auto& block : nn::parameter_blocks(state.second_moment)) {
            for (double v : block.values) CHECK(v >= 0.0);
        }
        CHECK(nn::all_finite(params));
    }
}

TEST_CASE("non-finite gradients are rejected with the block name") {
    auto params = testutil::random_params(2, 1, 6);
    nn::Gradients grads(2, 1);
    nn::AdamState state(2, 1);
    grads.u_input(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH(nn::adam_step(params, grads, state, 0.01),
                      Catch::Contains("u_input"));
}

TEST_CASE("learning rate must be positive") {
    auto params = testutil::random_params(2, 1, 6);
    nn::Gradients grads(2, 1);
    nn::AdamState state(2, 1);
    CHECK_THROWS_AS(nn::adam_step(params, grads, state, 0.0), std::invalid_argument);
}
