#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "finlstm/nn/lstm.hpp"

namespace finlstm::nn {

// The 11 weight-initialization schemes used by the ensemble, in canonical
// member order.
enum class InitializerScheme {
    RandomNormal,
    RandomUniform,
    TruncatedNormal,
    Zeros,
    Ones,
    GlorotNormal,
    GlorotUniform,
    Identity,
    Orthogonal,
    Constant,
    VarianceScaling,
};

inline constexpr std::size_t kSchemeCount = 11;

inline constexpr std::array<InitializerScheme, kSchemeCount> all_schemes() {
    return {InitializerScheme::RandomNormal,    InitializerScheme::RandomUniform,
            InitializerScheme::TruncatedNormal, InitializerScheme::Zeros,
            InitializerScheme::Ones,            InitializerScheme::GlorotNormal,
            InitializerScheme::GlorotUniform,   InitializerScheme::Identity,
            InitializerScheme::Orthogonal,      InitializerScheme::Constant,
            InitializerScheme::VarianceScaling};
}

inline std::string_view scheme_name(InitializerScheme scheme) {
    switch (scheme) {
    case InitializerScheme::RandomNormal: return "RandomNormal";
    case InitializerScheme::RandomUniform: return "RandomUniform";
    case InitializerScheme::TruncatedNormal: return "TruncatedNormal";
    case InitializerScheme::Zeros: return "Zeros";
    case InitializerScheme::Ones: return "Ones";
    case InitializerScheme::GlorotNormal: return "GlorotNormal";
    case InitializerScheme::GlorotUniform: return "GlorotUniform";
    case InitializerScheme::Identity: return "Identity";
    case InitializerScheme::Orthogonal: return "Orthogonal";
    case InitializerScheme::Constant: return "Constant";
    case InitializerScheme::VarianceScaling: return "VarianceScaling";
    }
    throw std::invalid_argument("scheme_name: unknown scheme");
}

inline InitializerScheme scheme_from_name(std::string_view name) {
    for (InitializerScheme scheme : all_schemes()) {
        if (scheme_name(scheme) == name) return scheme;
    }
    throw std::invalid_argument("unknown initializer scheme: " + std::string(name));
}

namespace detail {

inline double draw_truncated_normal(double stddev, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, stddev);
    for (;;) {
        const double v = normal(rng);
        if (std::abs(v) < 2.0 * stddev) return v;
    }
}

// Orthonormal columns via modified Gram-Schmidt on a random normal matrix.
// rows >= cols is required; random normal matrices are full rank a.s.
inline Matrix random_orthonormal_columns(std::size_t rows, std::size_t cols,
                                         std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix q(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) q(r, c) = normal(rng);

    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t prev = 0; prev < c; ++prev) {
            double proj = 0.0;
            for (std::size_t r = 0; r < rows; ++r) proj += q(r, prev) * q(r, c);
            for (std::size_t r = 0; r < rows; ++r) q(r, c) -= proj * q(r, prev);
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < rows; ++r) norm += q(r, c) * q(r, c);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::runtime_error("orthogonal init: degenerate column");
        for (std::size_t r = 0; r < rows; ++r) q(r, c) /= norm;
    }
    return q;
}

// Semi-orthogonal matrix of the requested shape: orthonormal rows or columns,
// whichever fits.
inline void fill_orthogonal(Matrix& w, std::mt19937_64& rng) {
    const std::size_t rows = w.rows(), cols = w.cols();
    if (rows >= cols) {
        w = random_orthonormal_columns(rows, cols, rng);
    } else {
        Matrix q = random_orthonormal_columns(cols, rows, rng);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) w(r, c) = q(c, r);
    }
}

inline void fill_glorot_uniform(Matrix& w, std::size_t fan_in, std::size_t fan_out,
                                std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> uniform(-limit, limit);
    for (double& v : w.flat()) v = uniform(rng);
}

inline void fill_weight_matrix(Matrix& w, InitializerScheme scheme, std::size_t fan_in,
                               std::size_t fan_out, std::mt19937_64& rng) {
    switch (scheme) {
    case InitializerScheme::RandomNormal: {
        std::normal_distribution<double> normal(0.0, 0.05);
        for (double& v : w.flat()) v = normal(rng);
        return;
    }
    case InitializerScheme::RandomUniform: {
        std::uniform_real_distribution<double> uniform(-0.05, 0.05);
        for (double& v : w.flat()) v = uniform(rng);
        return;
    }
    case InitializerScheme::TruncatedNormal: {
        for (double& v : w.flat()) v = draw_truncated_normal(0.05, rng);
        return;
    }
    case InitializerScheme::Zeros: {
        for (double& v : w.flat()) v = 0.0;
        return;
    }
    case InitializerScheme::Ones: {
        for (double& v : w.flat()) v = 1.0;
        return;
    }
    case InitializerScheme::GlorotNormal: {
        std::normal_distribution<double> normal(
            0.0, std::sqrt(2.0 / static_cast<double>(fan_in + fan_out)));
        for (double& v : w.flat()) v = normal(rng);
        return;
    }
    case InitializerScheme::GlorotUniform: {
        fill_glorot_uniform(w, fan_in, fan_out, rng);
        return;
    }
    case InitializerScheme::Identity: {
        // Identity is only defined for square blocks; rectangular ones fall
        // back to GlorotUniform so the scheme stays usable for W (m x n).
        if (w.rows() == w.cols()) {
            for (double& v : w.flat()) v = 0.0;
            for (std::size_t j = 0; j < w.rows(); ++j) w(j, j) = 1.0;
        } else {
            fill_glorot_uniform(w, fan_in, fan_out, rng);
        }
        return;
    }
    case InitializerScheme::Orthogonal: {
        fill_orthogonal(w, rng);
        return;
    }
    case InitializerScheme::Constant: {
        for (double& v : w.flat()) v = 0.05;
        return;
    }
    case InitializerScheme::VarianceScaling: {
        const double stddev = std::sqrt(1.0 / static_cast<double>(fan_in));
        for (double& v : w.flat()) v = draw_truncated_normal(stddev, rng);
        return;
    }
    }
    throw std::invalid_argument("fill_weight_matrix: unknown scheme");
}

} // namespace detail

// Builds a parameter set with every weight matrix filled per the scheme and
// all biases zero. Weight blocks are drawn in the canonical block order
// (input weights, recurrent weights, output layer), so a fixed (scheme, seed)
// is bit-reproducible. fan_in/fan_out are computed per matrix: (n, m) for the
// m x n input weights, (m, m) for the recurrent weights, (m, 1) for the
// output layer.
inline LstmParameters init_parameters(InitializerScheme scheme, std::size_t hidden_units,
                                      std::size_t input_features, std::uint64_t seed) {
    if (hidden_units == 0 || input_features == 0) {
        throw std::invalid_argument("init_parameters: hidden_units and input_features must be >= 1");
    }
    const std::size_t m = hidden_units, n = input_features;
    LstmParameters params(m, n);
    std::mt19937_64 rng(seed);

    for (Matrix* w : {&params.w_forget, &params.w_input, &params.w_output, &params.w_candidate}) {
        detail::fill_weight_matrix(*w, scheme, n, m, rng);
    }
    for (Matrix* u : {&params.u_forget, &params.u_input, &params.u_output, &params.u_candidate}) {
        detail::fill_weight_matrix(*u, scheme, m, m, rng);
    }
    // Output layer weights are a 1 x m row; reuse the matrix fill.
    Matrix w_out_row(1, m);
    detail::fill_weight_matrix(w_out_row, scheme, m, 1, rng);
    for (std::size_t j = 0; j < m; ++j) params.w_out[j] = w_out_row(0, j);
    // Biases (incl. b_out) stay zero for every scheme.
    return params;
}

} // namespace finlstm::nn
