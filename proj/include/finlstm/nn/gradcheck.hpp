#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "finlstm/nn/lstm.hpp"

namespace finlstm::nn {

struct GradCheckBlock {
    std::string name;
    double max_relative_error = 0.0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
    bool flagged = false;
};

struct GradCheckReport {
    std::vector<GradCheckBlock> blocks;
    double max_relative_error = 0.0;
    bool passed = true;
};

// Compares BPTT gradients against central finite differences, block by block.
// Dropout must be off (the perturbed losses would otherwise see different
// masks than the analytic pass).
inline GradCheckReport gradient_check(const LstmParameters& params, SequenceView sequence,
                                      double label, double step = 1e-5, double tolerance = 1e-4) {
    const std::size_t m = params.hidden_units();
    const std::size_t n = params.input_features();
    const DropoutMasks masks = DropoutMasks::none(m, n);
    const CellState initial = CellState::zeros(m);

    ForwardCache cache;
    forward(params, sequence, masks, initial, cache);
    const Gradients analytic = backward(params, sequence, label, masks, cache);

    LstmParameters perturbed = params;
    auto perturbed_blocks = parameter_blocks(perturbed);
    auto analytic_blocks = parameter_blocks(analytic);

    ForwardCache scratch;
    auto loss_at = [&](void) {
        const double p = forward(perturbed, sequence, masks, initial, scratch);
        return bce_loss(p, label);
    };

    GradCheckReport report;
    for (std::size_t b = 0; b < perturbed_blocks.size(); ++b) {
        GradCheckBlock block;
        block.name = std::string(perturbed_blocks[b].name);
        auto values = perturbed_blocks[b].values;
        auto grads = analytic_blocks[b].values;
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double original = values[k];
            values[k] = original + step;
            const double loss_plus = loss_at();
            values[k] = original - step;
            const double loss_minus = loss_at();
            values[k] = original;

            const double numeric = (loss_plus - loss_minus) / (2.0 * step);
            const double analytic_value = grads[k];
            const double rel = std::abs(analytic_value - numeric) /
                               std::max(1e-6, std::abs(analytic_value) + std::abs(numeric));
            if (rel > block.max_relative_error) {
                block.max_relative_error = rel;
                block.analytic_at_worst = analytic_value;
                block.numeric_at_worst = numeric;
            }
        }
        block.flagged = block.max_relative_error > tolerance;
        report.max_relative_error = std::max(report.max_relative_error, block.max_relative_error);
        if (block.flagged) report.passed = false;
        report.blocks.push_back(std::move(block));
    }
    return report;
}

} // namespace finlstm::nn
