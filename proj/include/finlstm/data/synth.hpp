#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "finlstm/data/date.hpp"
#include "finlstm/data/tables.hpp"
#include "finlstm/rng.hpp"

namespace finlstm::data {

// Synthetic market with a tunable planted signal. Each ticker's daily return
// blends an AR(1), sign-persistent factor g (predictable from past returns)
// with unpredictable market-wide and idiosyncratic noise:
//
//   r[k,t] = s * g[k,t] + (1 - s) * (market[t] + eps[k,t])
//
// where s = signal_strength. Two stylized facts are planted on top:
//   - factor innovations are negatively skewed (occasional crashes, frequent
//     small gains), and
//   - idiosyncratic noise swells after a factor drawdown (leverage effect):
//     eps[k,t] has stddev noise_vol * min(1 + leverage * max(0, -g[k,t-1]) /
//     signal_vol, leverage_cap).
//
// With s = 0 the series is a pure random walk (sign-symmetric, zero-mean
// noise); with s = 1 it is the bare AR(1) factor.
struct SynthConfig {
    std::size_t n_tickers = 10;
    std::size_t n_days = 1320; // price rows; returns span n_days - 1
    double signal_strength = 0.8;
    std::uint64_t seed = 42;
    double ar_coefficient = 0.9;
    double signal_vol = 0.012; // stationary stddev of g
    double market_vol = 0.03;
    double noise_vol = 0.036; // base idiosyncratic stddev
    double leverage = 4.0;    // drawdown-to-volatility coupling
    double leverage_cap = 8.0;
    Date start_date = Date(2016, 1, 4);
};

// Prices plus the planted per-day truth: ticker k's label on return day t is
// 1 iff its factor g[k,t] is strictly above the cross-sectional median of
// factors that day. The truth is recoverable only from the generator state,
// not from prices, and is meant for classifier evaluation.
struct SynthResult {
    PriceTable prices;
    LabelTable planted_truth;
};

namespace detail {

inline Date next_weekday(Date d) {
    do {
        d = d.next_day();
    } while ((d.serial() + 4) % 7 == 0 || (d.serial() + 4) % 7 == 6); // skip Sun/Sat
    return d;
}

inline Date first_weekday_at_or_after(Date d) {
    while ((d.serial() + 4) % 7 == 0 || (d.serial() + 4) % 7 == 6) d = d.next_day();
    return d;
}

} // namespace detail

inline SynthResult synth_generate(const SynthConfig& config) {
    if (config.n_tickers < 2) throw std::invalid_argument("synth_generate: need >= 2 tickers");
    if (config.n_days < 2) throw std::invalid_argument("synth_generate: need >= 2 days");
    if (config.signal_strength < 0.0 || config.signal_strength > 1.0) {
        throw std::invalid_argument("synth_generate: signal_strength must be in [0, 1]");
    }
    if (config.ar_coefficient <= -1.0 || config.ar_coefficient >= 1.0) {
        throw std::invalid_argument("synth_generate: ar_coefficient must be in (-1, 1)");
    }

    const std::size_t n_tickers = config.n_tickers;
    const std::size_t n_return_days = config.n_days - 1;
    const double phi = config.ar_coefficient;
    const double innovation_vol = config.signal_vol * std::sqrt(1.0 - phi * phi);
    constexpr std::size_t kBurnIn = 50;

    // Market stream is independent of the ticker count.
    std::vector<double> market(n_return_days);
    {
        auto rng = stream_rng(config.seed, 0);
        std::normal_distribution<double> normal(0.0, config.market_vol);
        for (double& v : market) v = normal(rng);
    }

    // Factor paths and leverage-scaled idiosyncratic noise, one stream per
    // ticker.
    std::vector<double> factors(n_return_days * n_tickers);
    std::vector<double> returns(n_return_days * n_tickers);
    const double s = config.signal_strength;
    for (std::size_t k = 0; k < n_tickers; ++k) {
        auto rng = stream_rng(config.seed, k + 1);
        std::exponential_distribution<double> expo(1.0);
        std::normal_distribution<double> unit_normal(0.0, 1.0);
        // (1 - Exp(1)) has mean 0, variance 1, skewness -2.
        auto innovation = [&]() { return innovation_vol * (1.0 - expo(rng)); };
        auto noise_scale = [&](double g_prev) {
            const double drawdown = std::max(0.0, -g_prev / config.signal_vol);
            return config.noise_vol *
                   std::min(1.0 + config.leverage * drawdown, config.leverage_cap);
        };

        double g = 0.0;
        for (std::size_t b = 0; b < kBurnIn; ++b) g = phi * g + innovation();
        for (std::size_t t = 0; t < n_return_days; ++t) {
            const double eps = noise_scale(g) * unit_normal(rng);
            g = phi * g + innovation();
            factors[t * n_tickers + k] = g;
            const double r = s * g + (1.0 - s) * (market[t] + eps);
            // Symmetric clamp keeps prices positive on extreme noise draws.
            returns[t * n_tickers + k] = std::clamp(r, -0.5, 0.5);
        }
    }

    SynthResult result;
    auto& prices = result.prices;
    prices.tickers.resize(n_tickers);
    for (std::size_t k = 0; k < n_tickers; ++k) {
        char name[24];
        std::snprintf(name, sizeof(name), "SYN%02u", static_cast<unsigned>(k));
        prices.tickers[k] = name;
    }
    prices.dates.resize(config.n_days);
    prices.dates[0] = detail::first_weekday_at_or_after(config.start_date);
    for (std::size_t d = 1; d < config.n_days; ++d) {
        prices.dates[d] = detail::next_weekday(prices.dates[d - 1]);
    }
    prices.close.assign(config.n_days * n_tickers, 100.0);
    for (std::size_t t = 0; t < n_return_days; ++t) {
        for (std::size_t k = 0; k < n_tickers; ++k) {
            prices.at(t + 1, k) = prices.at(t, k) * (1.0 + returns[t * n_tickers + k]);
        }
    }

    auto& truth = result.planted_truth;
    truth.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    truth.tickers = prices.tickers;
    truth.labels.resize(n_return_days * n_tickers);
    truth.medians.resize(n_return_days);
    std::vector<double> day(n_tickers);
    for (std::size_t t = 0; t < n_return_days; ++t) {
        for (std::size_t k = 0; k < n_tickers; ++k) day[k] = factors[t * n_tickers + k];
        const double median = median_of(day);
        truth.medians[t] = median;
        for (std::size_t k = 0; k < n_tickers; ++k) {
            truth.labels[t * n_tickers + k] = factors[t * n_tickers + k] > median ? 1 : 0;
        }
    }
    return result;
}

} // namespace finlstm::data
