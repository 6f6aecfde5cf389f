#include <catch2/catch.hpp>

#include <cmath>

#include "finlstm/nn/checkpoint.hpp"
#include "finlstm/nn/init.hpp"

using namespace finlstm;

namespace {

bool weights_all_equal(const nn::LstmParameters& p, double value) {
    for (const auto& block : nn::parameter_blocks(p)) {
        if (block.name[0] == 'b') continue; // biases are zero by contract
        for (double v : block.values) {
            if (v != value) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("scheme names round-trip") {
    for (auto scheme : nn::all_schemes()) {
        CHECK(nn::scheme_from_name(nn::scheme_name(scheme)) == scheme);
    }
    CHECK_THROWS_AS(nn::scheme_from_name("NotAScheme"), std::invalid_argument);
}

TEST_CASE("Zeros / Ones / Constant schemes") {
    CHECK(weights_all_equal(nn::init_parameters(nn::InitializerScheme::Zeros, 3, 1, 1), 0.0));
    CHECK(weights_all_equal(nn::init_parameters(nn::InitializerScheme::Ones, 3, 2, 1), 1.0));
    CHECK(weights_all_equal(nn::init_parameters(nn::InitializerScheme::Constant, 2, 1, 9), 0.05));
}

TEST_CASE("biases are zero for every scheme") {
    for (auto scheme : nn::all_schemes()) {
        const auto params = nn::init_parameters(scheme, 3, 2, 17);
        for (const auto& block : nn::parameter_blocks(params)) {
            if (block.name[0] != 'b') continue;
            for (double v : block.values) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("Orthogonal recurrent matrices satisfy Q^T Q = I") {
    const auto params = nn::init_parameters(nn::InitializerScheme::Orthogonal, 4, 1, 7);
    for (const auto* u : {&params.u_forget, &params.u_input, &params.u_output, &params.u_candidate}) {
        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = 0; b < 4; ++b) {
                double acc = 0.0;
                for (std::size_t r = 0; r < 4; ++r) acc += (*u)(r, a) * (*u)(r, b);
                CHECK(acc == Approx(a == b ? 1.0 : 0.0).margin(1e-10));
            }
        }
    }
    // m x 1 input weights become a unit-norm column.
    double norm = 0.0;
    for (double v : params.w_forget.flat()) norm += v * v;
    CHECK(norm == Approx(1.0).margin(1e-10));
}

TEST_CASE("RandomUniform and TruncatedNormal respect their bounds") {
    const auto uniform = nn::init_parameters(nn::InitializerScheme::RandomUniform, 6, 4, 3);
    for (const auto& block : nn::parameter_blocks(uniform)) {
        if (block.name[0] == 'b') continue;
        for (double v : block.values) CHECK(std::abs(v) <= 0.05);
    }
    const auto truncated = nn::init_parameters(nn::InitializerScheme::TruncatedNormal, 6, 4, 3);
    for (const auto& block : nn::parameter_blocks(truncated)) {
        if (block.name[0] == 'b') continue;
        for (double v : block.values) CHECK(std::abs(v) < 2.0 * 0.05);
    }
}

TEST_CASE("GlorotUniform bounds are computed per matrix") {
    const std::size_t m = 5, n = 2;
    const auto params = nn::init_parameters(nn::InitializerScheme::GlorotUniform, m, n, 11);
    const double w_limit = std::sqrt(6.0 / (n + m));
    for (double v : params.w_forget.flat()) CHECK(std::abs(v) <= w_limit);
    const double u_limit = std::sqrt(6.0 / (m + m));
    for (double v : params.u_candidate.flat()) CHECK(std::abs(v) <= u_limit);
    const double out_limit = std::sqrt(6.0 / (m + 1));
    for (double v : params.w_out) CHECK(std::abs(v) <= out_limit);
}

TEST_CASE("VarianceScaling draws a truncated normal with stddev sqrt(1/fan_in)") {
    const std::size_t m = 4, n = 3;
    const auto params = nn::init_parameters(nn::InitializerScheme::VarianceScaling, m, n, 23);
    const double w_bound = 2.0 * std::sqrt(1.0 / n);
    for (double v : params.w_input.flat()) CHECK(std::abs(v) < w_bound);
    const double u_bound = 2.0 * std::sqrt(1.0 / m);
    for (double v : params.u_input.flat()) CHECK(std::abs(v) < u_bound);
}

TEST_CASE("Identity applies to square blocks and falls back on rectangular ones") {
    const std::size_t m = 3, n = 2;
    const auto params = nn::init_parameters(nn::InitializerScheme::Identity, m, n, 2);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            CHECK(params.u_forget(a, b) == (a == b ? 1.0 : 0.0));
        }
    }
    // Rectangular input weights use the GlorotUniform fallback: inside the
    // Glorot bound and not all equal.
    const double limit = std::sqrt(6.0 / (n + m));
    bool any_nonzero = false;
    for (double v : params.w_forget.flat()) {
        CHECK(std::abs(v) <= limit);
        if (v != 0.0) any_nonzero = true;
    }
    CHECK(any_nonzero);
}

TEST_CASE("initialization is bit-reproducible per (scheme, seed)") {
    for (auto scheme : nn::all_schemes()) {
        const auto a = nn::init_parameters(scheme, 3, 1, 42);
        const auto b = nn::init_parameters(scheme, 3, 1, 42);
        nn::Checkpoint ca{scheme, 42, a}, cb{scheme, 42, b};
        CHECK(nn::serialize_checkpoint(ca) == nn::serialize_checkpoint(cb));
    }
    // Seed sensitivity for a stochastic scheme.
    const auto a = nn::init_parameters(nn::InitializerScheme::RandomNormal, 3, 1, 42);
    const auto b = nn::init_parameters(nn::InitializerScheme::RandomNormal, 3, 1, 43);
    CHECK(nn::serialize_checkpoint({nn::InitializerScheme::RandomNormal, 42, a}) !=
          nn::serialize_checkpoint({nn::InitializerScheme::RandomNormal, 43, b}));
}

TEST_CASE("init_parameters validates its dimensions") {
    CHECK_THROWS_AS(nn::init_parameters(nn::InitializerScheme::Zeros, 0, 1, 1),
                    std::invalid_argument);
}
