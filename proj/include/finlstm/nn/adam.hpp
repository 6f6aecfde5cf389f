#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "finlstm/nn/lstm.hpp"

namespace finlstm::nn {

// Adam moment accumulators, one slot per parameter block.
struct AdamState {
    Gradients first_moment;
    Gradients second_moment;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    AdamState(std::size_t hidden_units, std::size_t input_features)
        : first_moment(hidden_units, input_features), second_moment(hidden_units, input_features) {}
};

// One Adam update with bias correction, applied in place. Throws if any
// gradient entry is non-finite, naming the offending parameter block.
inline void adam_step(LstmParameters& params, const Gradients& grads, AdamState& state,
                      double learning_rate) {
    if (learning_rate <= 0.0) throw std::invalid_argument("adam_step: learning_rate must be > 0");

    auto param_blocks = parameter_blocks(params);
    auto grad_blocks = parameter_blocks(grads);
    auto m_blocks = parameter_blocks(state.first_moment);
    auto v_blocks = parameter_blocks(state.second_moment);

    for (std::size_t b = 0; b < grad_blocks.size(); ++b) {
        if (grad_blocks[b].values.size() != param_blocks[b].values.size()) {
            throw std::invalid_argument("adam_step: gradient shape mismatch in block " +
                                        std::string(grad_blocks[b].name));
        }
        for (double g : grad_blocks[b].values) {
            if (!std::isfinite(g)) {
                throw std::runtime_error("adam_step: non-finite gradient in block " +
                                         std::string(grad_blocks[b].name));
            }
        }
    }

    state.step += 1;
    const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    for (std::size_t b = 0; b < param_blocks.size(); ++b) {
        auto theta = param_blocks[b].values;
        auto grad = grad_blocks[b].values;
        auto m = m_blocks[b].values;
        auto v = v_blocks[b].values;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * grad[k];
            v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * grad[k] * grad[k];
            const double m_hat = m[k] / bias1;
            const double v_hat = v[k] / bias2;
            theta[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

} // namespace finlstm::nn
