#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "finlstm/nn/matrix.hpp"

namespace finlstm::nn {

// Numerically safe logistic function. Saturates cleanly for |x| up to ~1e3.
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Trainable parameter count of the LSTM layer alone: 4mn input weights,
// 4m^2 recurrent weights, 4m biases.
inline long long param_count(long long hidden_units, long long input_features) {
    if (hidden_units < 1 || input_features < 1) {
        throw std::invalid_argument("param_count: hidden_units and input_features must be >= 1");
    }
    return 4 * hidden_units * input_features + 4 * hidden_units * hidden_units + 4 * hidden_units;
}

// Same count including the dense sigmoid output layer (m weights + 1 bias).
inline long long param_count_with_output(long long hidden_units, long long input_features) {
    return param_count(hidden_units, input_features) + hidden_units + 1;
}

// Full parameter set of the model: one LSTM layer plus a scalar sigmoid
// output layer. Field names follow the gate they feed.
struct LstmParameters {
    Matrix w_forget, w_input, w_output, w_candidate; // m x n
    Matrix u_forget, u_input, u_output, u_candidate; // m x m
    Vector b_forget, b_input, b_output, b_candidate; // m
    Vector w_out;                                    // m
    double b_out = 0.0;

    LstmParameters() = default;
    LstmParameters(std::size_t hidden_units, std::size_t input_features)
        : w_forget(hidden_units, input_features),
          w_input(hidden_units, input_features),
          w_output(hidden_units, input_features),
          w_candidate(hidden_units, input_features),
          u_forget(hidden_units, hidden_units),
          u_input(hidden_units, hidden_units),
          u_output(hidden_units, hidden_units),
          u_candidate(hidden_units, hidden_units),
          b_forget(hidden_units, 0.0),
          b_input(hidden_units, 0.0),
          b_output(hidden_units, 0.0),
          b_candidate(hidden_units, 0.0),
          w_out(hidden_units, 0.0) {}

    std::size_t hidden_units() const { return w_forget.rows(); }
    std::size_t input_features() const { return w_forget.cols(); }
};

// Gradient of a loss with respect to every LstmParameters field.
struct Gradients {
    Matrix w_forget, w_input, w_output, w_candidate;
    Matrix u_forget, u_input, u_output, u_candidate;
    Vector b_forget, b_input, b_output, b_candidate;
    Vector w_out;
    double b_out = 0.0;

    Gradients() = default;
    Gradients(std::size_t hidden_units, std::size_t input_features)
        : w_forget(hidden_units, input_features),
          w_input(hidden_units, input_features),
          w_output(hidden_units, input_features),
          w_candidate(hidden_units, input_features),
          u_forget(hidden_units, hidden_units),
          u_input(hidden_units, hidden_units),
          u_output(hidden_units, hidden_units),
          u_candidate(hidden_units, hidden_units),
          b_forget(hidden_units, 0.0),
          b_input(hidden_units, 0.0),
          b_output(hidden_units, 0.0),
          b_candidate(hidden_units, 0.0),
          w_out(hidden_units, 0.0) {}

    void set_zero() {
        auto zero = [](std::span<double> s) { std::fill(s.begin(), s.end(), 0.0); };
        zero(w_forget.flat());
        zero(w_input.flat());
        zero(w_output.flat());
        zero(w_candidate.flat());
        zero(u_forget.flat());
        zero(u_input.flat());
        zero(u_output.flat());
        zero(u_candidate.flat());
        zero(b_forget);
        zero(b_input);
        zero(b_output);
        zero(b_candidate);
        zero(w_out);
        b_out = 0.0;
    }
};

// Named view over every parameter block, in the canonical (checkpoint) order.
template <class Params>
struct BlockRef {
    std::string_view name;
    std::span<std::conditional_t<std::is_const_v<Params>, const double, double>> values;
};

// Canonical block order: input weights, recurrent weights, biases (each in
// forget/input/output/candidate order), then the output layer.
template <class Params>
inline std::vector<BlockRef<Params>> parameter_blocks(Params& p) {
    return {
        {"w_forget", p.w_forget.flat()},
        {"w_input", p.w_input.flat()},
        {"w_output", p.w_output.flat()},
        {"w_candidate", p.w_candidate.flat()},
        {"u_forget", p.u_forget.flat()},
        {"u_input", p.u_input.flat()},
        {"u_output", p.u_output.flat()},
        {"u_candidate", p.u_candidate.flat()},
        {"b_forget", std::span(p.b_forget)},
        {"b_input", std::span(p.b_input)},
        {"b_output", std::span(p.b_output)},
        {"b_candidate", std::span(p.b_candidate)},
        {"w_out", std::span(p.w_out)},
        {"b_out", std::span(&p.b_out, 1)},
    };
}

template <class Params>
inline bool all_finite(Params& p) {
    for (const auto& block : parameter_blocks(p)) {
        for (double v : block.values) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

// Cell memory s and hidden output h at one timestep.
struct CellState {
    Vector s;
    Vector h;

    static CellState zeros(std::size_t hidden_units) {
        return CellState{Vector(hidden_units, 0.0), Vector(hidden_units, 0.0)};
    }
};

// Inverted-dropout masks, sampled once per sequence and applied to the input
// (x_t) and the recurrent output (h_{t-1}). Entries are 0 or 1/(1-rate).
struct DropoutMasks {
    Vector input_mask;     // n entries
    Vector recurrent_mask; // m entries

    static DropoutMasks none(std::size_t hidden_units, std::size_t input_features) {
        return DropoutMasks{Vector(input_features, 1.0), Vector(hidden_units, 1.0)};
    }

    template <class Rng>
    static DropoutMasks sample(double input_rate, double recurrent_rate, std::size_t hidden_units,
                               std::size_t input_features, Rng& rng) {
        DropoutMasks masks = none(hidden_units, input_features);
        fill_mask(masks.input_mask, input_rate, rng);
        fill_mask(masks.recurrent_mask, recurrent_rate, rng);
        return masks;
    }

    template <class Rng>
    void resample(double input_rate, double recurrent_rate, Rng& rng) {
        fill_mask(input_mask, input_rate, rng);
        fill_mask(recurrent_mask, recurrent_rate, rng);
    }

private:
    template <class Rng>
    static void fill_mask(Vector& mask, double rate, Rng& rng) {
        if (rate < 0.0 || rate >= 1.0) {
            throw std::invalid_argument("DropoutMasks: rate must be in [0, 1)");
        }
        if (rate == 0.0) {
            std::fill(mask.begin(), mask.end(), 1.0);
            return;
        }
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const double keep_scale = 1.0 / (1.0 - rate);
        for (double& entry : mask) {
            entry = uniform(rng) < rate ? 0.0 : keep_scale;
        }
    }
};

// Flattened view of a sequence: `steps` timesteps of `features` values each.
struct SequenceView {
    std::span<const double> flat;
    std::size_t features = 1;

    std::size_t steps() const { return features == 0 ? 0 : flat.size() / features; }
    std::span<const double> step(std::size_t t) const { return flat.subspan(t * features, features); }
};

// Everything the backward pass needs, stored flat per timestep. Reusable
// across samples without reallocating.
struct ForwardCache {
    std::size_t hidden = 0, features = 0, steps = 0;
    Vector x_masked;       // steps x n
    Vector h_prev_masked;  // steps x m
    Vector f, i, o, cand;  // steps x m, post-activation gate values
    Vector s, tanh_s, h;   // steps x m
    Vector s0;             // m, initial cell memory
    double z_out = 0.0;
    double prediction = 0.5;

    void resize(std::size_t hidden_units, std::size_t input_features, std::size_t n_steps) {
        hidden = hidden_units;
        features = input_features;
        steps = n_steps;
        x_masked.resize(steps * features);
        const std::size_t sm = steps * hidden;
        h_prev_masked.resize(sm);
        f.resize(sm);
        i.resize(sm);
        o.resize(sm);
        cand.resize(sm);
        s.resize(sm);
        tanh_s.resize(sm);
        h.resize(sm);
        s0.assign(hidden, 0.0);
    }

    std::span<double> row(Vector& v, std::size_t t) { return {v.data() + t * hidden, hidden}; }
    std::span<const double> row(const Vector& v, std::size_t t) const {
        return {v.data() + t * hidden, hidden};
    }
};

namespace detail {

inline void check_shapes(const LstmParameters& p, std::size_t x_size, std::size_t state_size) {
    if (x_size != p.input_features() || state_size != p.hidden_units()) {
        throw std::invalid_argument("lstm: input/state dimensions do not match parameters");
    }
}

// One gate pre-activation: z = W x + U h + b, written into out.
inline void gate_preactivation(const Matrix& w, const Matrix& u, const Vector& b,
                               std::span<const double> x, std::span<const double> h,
                               std::span<double> out) {
    std::copy(b.begin(), b.end(), out.begin());
    matvec_accumulate(w, x, out);
    matvec_accumulate(u, h, out);
}

} // namespace detail

// Single LSTM step:
//   f = sig(W_f x~ + U_f h~ + b_f)     i, o analogous
//   cand = tanh(W_c x~ + U_c h~ + b_c)
//   s' = f . s + i . cand
//   h' = o . tanh(s')
// where x~ and h~ are the mask-scaled input and previous output.
inline CellState cell_step(const LstmParameters& params, std::span<const double> x,
                           const CellState& prev, const DropoutMasks& masks) {
    const std::size_t m = params.hidden_units();
    const std::size_t n = params.input_features();
    detail::check_shapes(params, x.size(), prev.s.size());
    if (prev.h.size() != m || masks.input_mask.size() != n || masks.recurrent_mask.size() != m) {
        throw std::invalid_argument("cell_step: state/mask dimensions do not match parameters");
    }

    Vector x_masked(n);
    for (std::size_t k = 0; k < n; ++k) x_masked[k] = masks.input_mask[k] * x[k];
    Vector h_masked(m);
    for (std::size_t j = 0; j < m; ++j) h_masked[j] = masks.recurrent_mask[j] * prev.h[j];

    Vector f(m), i(m), o(m), cand(m);
    detail::gate_preactivation(params.w_forget, params.u_forget, params.b_forget, x_masked, h_masked, f);
    detail::gate_preactivation(params.w_input, params.u_input, params.b_input, x_masked, h_masked, i);
    detail::gate_preactivation(params.w_output, params.u_output, params.b_output, x_masked, h_masked, o);
    detail::gate_preactivation(params.w_candidate, params.u_candidate, params.b_candidate, x_masked,
                               h_masked, cand);

    CellState next = CellState::zeros(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double fj = sigmoid(f[j]);
        const double ij = sigmoid(i[j]);
        const double oj = sigmoid(o[j]);
        const double cj = std::tanh(cand[j]);
        next.s[j] = fj * prev.s[j] + ij * cj;
        next.h[j] = oj * std::tanh(next.s[j]);
    }
    return next;
}

// Forward pass over a whole sequence, caching every activation needed by
// backward. Returns the sigmoid output (= prediction in (0,1)).
inline double forward(const LstmParameters& params, SequenceView sequence,
                      const DropoutMasks& masks, const CellState& initial, ForwardCache& cache) {
    const std::size_t m = params.hidden_units();
    const std::size_t n = params.input_features();
    const std::size_t steps = sequence.steps();
    if (steps == 0) throw std::invalid_argument("forward: empty sequence");
    if (sequence.features != n || sequence.flat.size() != steps * n) {
        throw std::invalid_argument("forward: sequence feature count does not match parameters");
    }
    if (initial.s.size() != m || initial.h.size() != m) {
        throw std::invalid_argument("forward: initial state does not match hidden size");
    }
    if (masks.input_mask.size() != n || masks.recurrent_mask.size() != m) {
        throw std::invalid_argument("forward: mask dimensions do not match parameters");
    }

    cache.resize(m, n, steps);
    std::copy(initial.s.begin(), initial.s.end(), cache.s0.begin());

    const double* s_prev = initial.s.data();
    const double* h_prev = initial.h.data();
    for (std::size_t t = 0; t < steps; ++t) {
        auto x = sequence.step(t);
        auto xm = std::span<double>(cache.x_masked.data() + t * n, n);
        for (std::size_t k = 0; k < n; ++k) xm[k] = masks.input_mask[k] * x[k];
        auto hm = cache.row(cache.h_prev_masked, t);
        for (std::size_t j = 0; j < m; ++j) hm[j] = masks.recurrent_mask[j] * h_prev[j];

        auto f = cache.row(cache.f, t);
        auto i = cache.row(cache.i, t);
        auto o = cache.row(cache.o, t);
        auto cand = cache.row(cache.cand, t);
        detail::gate_preactivation(params.w_forget, params.u_forget, params.b_forget, xm, hm, f);
        detail::gate_preactivation(params.w_input, params.u_input, params.b_input, xm, hm, i);
        detail::gate_preactivation(params.w_output, params.u_output, params.b_output, xm, hm, o);
        detail::gate_preactivation(params.w_candidate, params.u_candidate, params.b_candidate, xm, hm,
                                   cand);

        auto s = cache.row(cache.s, t);
        auto ts = cache.row(cache.tanh_s, t);
        auto h = cache.row(cache.h, t);
        for (std::size_t j = 0; j < m; ++j) {
            f[j] = sigmoid(f[j]);
            i[j] = sigmoid(i[j]);
            o[j] = sigmoid(o[j]);
            cand[j] = std::tanh(cand[j]);
            s[j] = f[j] * s_prev[j] + i[j] * cand[j];
            ts[j] = std::tanh(s[j]);
            h[j] = o[j] * ts[j];
        }
        s_prev = s.data();
        h_prev = h.data();
    }

    cache.z_out = params.b_out + dot(cache.row(cache.h, steps - 1), params.w_out);
    cache.prediction = sigmoid(cache.z_out);
    return cache.prediction;
}

// Inference-style forward: no dropout, zero initial state, no cache kept.
inline double forward_predict(const LstmParameters& params, SequenceView sequence,
                              ForwardCache& cache) {
    const DropoutMasks masks = DropoutMasks::none(params.hidden_units(), params.input_features());
    return forward(params, sequence, masks, CellState::zeros(params.hidden_units()), cache);
}

inline constexpr double kBceEpsilon = 1e-7;

// Binary cross-entropy with the prediction clamped away from {0,1}.
inline double bce_loss(double prediction, double label) {
    const double p = std::clamp(prediction, kBceEpsilon, 1.0 - kBceEpsilon);
    return -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
}

// Scratch buffers for backward; reusable across calls.
struct BackwardScratch {
    Vector dh, ds, dzf, dzi, dzo, dzc;

    void resize(std::size_t hidden_units) {
        dh.assign(hidden_units, 0.0);
        ds.assign(hidden_units, 0.0);
        dzf.resize(hidden_units);
        dzi.resize(hidden_units);
        dzo.resize(hidden_units);
        dzc.resize(hidden_units);
    }
};

// Backpropagation through time for the BCE loss of one sequence. Adds
// `scale * d(loss)/d(theta)` into `grads` (callers accumulate batch means by
// passing scale = 1/batch_size).
inline void backward_accumulate(const LstmParameters& params, SequenceView sequence, double label,
                                const DropoutMasks& masks, const ForwardCache& cache,
                                Gradients& grads, BackwardScratch& scratch, double scale = 1.0) {
    const std::size_t m = params.hidden_units();
    const std::size_t n = params.input_features();
    if (cache.hidden != m || cache.features != n || cache.steps == 0 ||
        cache.steps != sequence.steps()) {
        throw std::invalid_argument("backward: cache does not match parameters/sequence");
    }
    if (grads.w_forget.rows() != m || grads.w_forget.cols() != n) {
        throw std::invalid_argument("backward: gradient shapes do not match parameters");
    }

    scratch.resize(m);
    auto& dh = scratch.dh;
    auto& ds = scratch.ds;

    // Output layer: dL/dz = p - y for sigmoid + BCE.
    const double dz_out = scale * (cache.prediction - label);
    const auto h_last = cache.row(cache.h, cache.steps - 1);
    for (std::size_t j = 0; j < m; ++j) {
        grads.w_out[j] += dz_out * h_last[j];
        dh[j] = dz_out * params.w_out[j];
    }
    grads.b_out += dz_out;

    for (std::size_t t = cache.steps; t-- > 0;) {
        const auto f = cache.row(cache.f, t);
        const auto i = cache.row(cache.i, t);
        const auto o = cache.row(cache.o, t);
        const auto cand = cache.row(cache.cand, t);
        const auto tanh_s = cache.row(cache.tanh_s, t);
        const std::span<const double> s_prev =
            t > 0 ? cache.row(cache.s, t - 1) : std::span<const double>(cache.s0);

        for (std::size_t j = 0; j < m; ++j) {
            const double do_j = dh[j] * tanh_s[j];
            ds[j] += dh[j] * o[j] * (1.0 - tanh_s[j] * tanh_s[j]);
            const double df_j = ds[j] * s_prev[j];
            const double di_j = ds[j] * cand[j];
            const double dc_j = ds[j] * i[j];
            scratch.dzf[j] = df_j * f[j] * (1.0 - f[j]);
            scratch.dzi[j] = di_j * i[j] * (1.0 - i[j]);
            scratch.dzo[j] = do_j * o[j] * (1.0 - o[j]);
            scratch.dzc[j] = dc_j * (1.0 - cand[j] * cand[j]);
        }

        const auto x_masked = std::span<const double>(cache.x_masked.data() + t * n, n);
        const auto h_prev_masked = cache.row(cache.h_prev_masked, t);
        outer_accumulate(grads.w_forget, scratch.dzf, x_masked);
        outer_accumulate(grads.w_input, scratch.dzi, x_masked);
        outer_accumulate(grads.w_output, scratch.dzo, x_masked);
        outer_accumulate(grads.w_candidate, scratch.dzc, x_masked);
        outer_accumulate(grads.u_forget, scratch.dzf, h_prev_masked);
        outer_accumulate(grads.u_input, scratch.dzi, h_prev_masked);
        outer_accumulate(grads.u_output, scratch.dzo, h_prev_masked);
        outer_accumulate(grads.u_candidate, scratch.dzc, h_prev_masked);
        for (std::size_t j = 0; j < m; ++j) {
            grads.b_forget[j] += scratch.dzf[j];
            grads.b_input[j] += scratch.dzi[j];
            grads.b_output[j] += scratch.dzo[j];
            grads.b_candidate[j] += scratch.dzc[j];
        }

        // dL/dh_{t-1} through the masked recurrent connections, then the mask.
        std::fill(dh.begin(), dh.end(), 0.0);
        matvec_transposed_accumulate(params.u_forget, scratch.dzf, dh);
        matvec_transposed_accumulate(params.u_input, scratch.dzi, dh);
        matvec_transposed_accumulate(params.u_output, scratch.dzo, dh);
        matvec_transposed_accumulate(params.u_candidate, scratch.dzc, dh);
        for (std::size_t j = 0; j < m; ++j) {
            dh[j] *= masks.recurrent_mask[j];
            ds[j] *= f[j];
        }
    }
}

// Gradient of the BCE loss for one (sequence, label) pair.
inline Gradients backward(const LstmParameters& params, SequenceView sequence, double label,
                          const DropoutMasks& masks, const ForwardCache& cache) {
    Gradients grads(params.hidden_units(), params.input_features());
    BackwardScratch scratch;
    backward_accumulate(params, sequence, label, masks, cache, grads, scratch, 1.0);
    return grads;
}

} // namespace finlstm::nn
