#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "finlstm/data/sequences.hpp"
#include "finlstm/errors.hpp"
#include "finlstm/rng.hpp"
#include "finlstm/nn/adam.hpp"
#include "finlstm/nn/hyper.hpp"
#include "finlstm/nn/init.hpp"
#include "finlstm/nn/lstm.hpp"

namespace finlstm::ensemble {

struct TrainingLog {
    std::vector<double> train_loss; // mean BCE per epoch
    std::vector<double> val_loss;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    double best_val_loss = std::numeric_limits<double>::infinity();
};

struct TrainResult {
    nn::LstmParameters params;
    TrainingLog log;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

inline double mean_validation_loss(const nn::LstmParameters& params,
                                   std::span<const data::SequenceSample> samples,
                                   nn::ForwardCache& cache) {
    const nn::DropoutMasks masks =
        nn::DropoutMasks::none(params.hidden_units(), params.input_features());
    const nn::CellState initial = nn::CellState::zeros(params.hidden_units());
    double total = 0.0;
    for (const auto& sample : samples) {
        const double p =
            nn::forward(params, nn::SequenceView{sample.input, 1}, masks, initial, cache);
        total += nn::bce_loss(p, static_cast<double>(sample.target));
    }
    return total / static_cast<double>(samples.size());
}

} // namespace detail

// Trains one ensemble member on pooled cross-ticker sequences: per-epoch
// shuffling, minibatch Adam on mean BCE, fresh per-sequence dropout masks on
// every visit, early stopping on validation loss with best-weights restore.
// Deterministic for a fixed (scheme, seed, data).
inline TrainResult train_member(nn::InitializerScheme scheme,
                                std::span<const data::SequenceSample> train_samples,
                                std::span<const data::SequenceSample> val_samples,
                                const nn::HyperParams& hyper, std::uint64_t seed) {
    hyper.validate();
    if (train_samples.empty() || val_samples.empty()) {
        throw std::invalid_argument("train_member: train and validation sets must be non-empty");
    }
    for (const auto* set : {&train_samples, &val_samples}) {
        for (const auto& sample : *set) {
            if (sample.input.size() != hyper.seq_len) {
                throw std::invalid_argument("train_member: sample length does not match seq_len");
            }
        }
    }

    const std::size_t m = hyper.hidden_units;
    constexpr std::size_t n_features = 1;

    TrainResult result;
    result.params = nn::init_parameters(scheme, m, n_features, seed);
    nn::LstmParameters best_params = result.params;

    auto rng = std::mt19937_64(detail::mix_seed(seed, 0x7261696eULL)); // shuffles + masks
    nn::AdamState adam(m, n_features);
    nn::Gradients grads(m, n_features);
    nn::ForwardCache cache;
    nn::BackwardScratch scratch;
    nn::DropoutMasks masks = nn::DropoutMasks::none(m, n_features);
    const nn::CellState initial = nn::CellState::zeros(m);

    std::vector<std::size_t> order(train_samples.size());
    std::iota(order.begin(), order.end(), 0);

    auto& log = result.log;
    std::size_t epochs_since_best = 0;
    for (std::size_t epoch = 0; epoch < hyper.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
            const std::size_t count = std::min(hyper.batch_size, order.size() - start);
            const double scale = 1.0 / static_cast<double>(count);
            grads.set_zero();
            double batch_loss = 0.0;
            for (std::size_t b = 0; b < count; ++b) {
                const auto& sample = train_samples[order[start + b]];
                masks.resample(hyper.dropout, hyper.recurrent_dropout, rng);
                const nn::SequenceView view{sample.input, n_features};
                const double p = nn::forward(result.params, view, masks, initial, cache);
                const double label = static_cast<double>(sample.target);
                batch_loss += nn::bce_loss(p, label);
                nn::backward_accumulate(result.params, view, label, masks, cache, grads, scratch,
                                        scale);
            }
            if (!std::isfinite(batch_loss)) {
                throw TrainingDivergence("training diverged: non-finite loss (scheme " +
                                         std::string(nn::scheme_name(scheme)) + ", epoch " +
                                         std::to_string(epoch) + ")");
            }
            nn::adam_step(result.params, grads, adam, hyper.learning_rate);
            if (!nn::all_finite(result.params)) {
                throw TrainingDivergence("training diverged: non-finite parameters (scheme " +
                                         std::string(nn::scheme_name(scheme)) + ", epoch " +
                                         std::to_string(epoch) + ")");
            }
            epoch_loss += batch_loss;
        }
        log.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));

        const double val_loss = detail::mean_validation_loss(result.params, val_samples, cache);
        log.val_loss.push_back(val_loss);
        if (!std::isfinite(val_loss)) {
            throw TrainingDivergence("training diverged: non-finite validation loss (scheme " +
                                     std::string(nn::scheme_name(scheme)) + ", epoch " +
                                     std::to_string(epoch) + ")");
        }
        log.epochs_run = epoch + 1;

        if (val_loss < log.best_val_loss) {
            log.best_val_loss = val_loss;
            log.best_epoch = epoch;
            best_params = result.params;
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
            if (epochs_since_best >= hyper.patience) break;
        }
    }

    result.params = best_params;
    return result;
}

} // namespace finlstm::ensemble
