#pragma once

#include <cstddef>
#include <string>

#include "finlstm/errors.hpp"

namespace finlstm::nn {

// Model and training hyperparameters. Defaults are the reference
// configuration: 3 hidden units, lr 0.0075, dropout 0.06 / recurrent 0.14,
// batch 6800, 240-step sequences.
struct HyperParams {
    std::size_t hidden_units = 3;
    double learning_rate = 0.0075;
    double dropout = 0.06;
    double recurrent_dropout = 0.14;
    std::size_t batch_size = 6800;
    std::size_t max_epochs = 100;
    std::size_t patience = 10;
    std::size_t seq_len = 240;

    void validate() const {
        if (hidden_units < 1) throw ValidationError("hidden_units must be >= 1");
        if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
        if (dropout < 0.0 || dropout >= 1.0) throw ValidationError("dropout must be in [0, 1)");
        if (recurrent_dropout < 0.0 || recurrent_dropout >= 1.0) {
            throw ValidationError("recurrent_dropout must be in [0, 1)");
        }
        if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
        if (max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
        if (seq_len < 1) throw ValidationError("seq_len must be >= 1");
    }
};

} // namespace finlstm::nn
