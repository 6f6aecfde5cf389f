#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finlstm/backtest/ledger.hpp"
#include "finlstm/data/csv.hpp"

namespace finlstm::backtest {

inline constexpr double kTradingDaysPerYear = 252.0;

// Summary of daily returns, reported in percent.
struct ReturnStats {
    double mean_percent = 0.0;
    std::optional<double> stdev_percent; // absent for single-day groups
    double min_percent = 0.0;
    double max_percent = 0.0;
    std::size_t n_days = 0;
};

struct YearlyStats {
    int year = 0;
    ReturnStats stats;
};

struct RiskRow {
    int year = 0;
    double annualized_volatility_percent = 0.0;
    std::optional<double> sharpe;  // absent when the excess-return stdev is 0
    std::optional<double> sortino; // absent when the downside deviation is undefined
};

namespace detail {

inline double mean_of(std::span<const double> values) {
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
}

// Sample standard deviation (n-1).
inline double sample_stdev(std::span<const double> values) {
    const double mean = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

inline ReturnStats stats_of(std::span<const double> returns) {
    ReturnStats stats;
    stats.n_days = returns.size();
    stats.mean_percent = mean_of(returns) * 100.0;
    stats.min_percent = *std::min_element(returns.begin(), returns.end()) * 100.0;
    stats.max_percent = *std::max_element(returns.begin(), returns.end()) * 100.0;
    if (returns.size() >= 2) stats.stdev_percent = sample_stdev(returns) * 100.0;
    return stats;
}

} // namespace detail

inline ReturnStats daily_stats(const PortfolioLedger& ledger) {
    if (ledger.entries.size() < 2) {
        throw std::invalid_argument("daily_stats: need at least 2 days for the stdev");
    }
    const auto returns = ledger.daily_returns();
    return detail::stats_of(returns);
}

// Same summaries grouped by calendar year; a one-day year keeps its mean but
// carries no stdev.
inline std::vector<YearlyStats> yearly_stats(const PortfolioLedger& ledger) {
    if (ledger.entries.empty()) throw std::invalid_argument("yearly_stats: empty ledger");
    std::map<int, std::vector<double>> by_year;
    for (const auto& entry : ledger.entries) {
        by_year[entry.date.year()].push_back(entry.daily_return);
    }
    std::vector<YearlyStats> rows;
    for (const auto& [year, returns] : by_year) {
        rows.push_back(YearlyStats{year, detail::stats_of(returns)});
    }
    return rows;
}

// Compounded cumulative return per day.
inline std::vector<std::pair<data::Date, double>> cumulative_series(const PortfolioLedger& ledger) {
    std::vector<std::pair<data::Date, double>> series;
    series.reserve(ledger.entries.size());
    double growth = 1.0;
    for (const auto& entry : ledger.entries) {
        growth *= 1.0 + entry.daily_return;
        series.emplace_back(entry.date, growth - 1.0);
    }
    return series;
}

// Sample stdev of daily returns scaled by sqrt(252), in percent.
inline double annualized_volatility(std::span<const double> daily_returns) {
    if (daily_returns.size() < 2) {
        throw std::invalid_argument("annualized_volatility: need at least 2 days");
    }
    return detail::sample_stdev(daily_returns) * std::sqrt(kTradingDaysPerYear) * 100.0;
}

// Annualized mean/stdev ratio of the daily excess returns.
inline double sharpe(std::span<const double> daily_returns, std::span<const double> daily_rf) {
    if (daily_returns.size() != daily_rf.size()) {
        throw std::invalid_argument("sharpe: returns and risk-free series must align");
    }
    if (daily_returns.size() < 2) throw std::invalid_argument("sharpe: need at least 2 days");
    std::vector<double> excess(daily_returns.size());
    for (std::size_t i = 0; i < excess.size(); ++i) excess[i] = daily_returns[i] - daily_rf[i];
    const double stdev = detail::sample_stdev(excess);
    if (stdev == 0.0) throw std::runtime_error("sharpe: undefined ratio (zero deviation)");
    return detail::mean_of(excess) / stdev * std::sqrt(kTradingDaysPerYear);
}

// Annualized ratio of mean excess return to the downside deviation, where the
// downside deviation is the sample stdev of the strictly negative daily
// portfolio returns.
inline double sortino(std::span<const double> daily_returns, std::span<const double> daily_rf) {
    if (daily_returns.size() != daily_rf.size()) {
        throw std::invalid_argument("sortino: returns and risk-free series must align");
    }
    if (daily_returns.empty()) throw std::invalid_argument("sortino: empty input");
    std::vector<double> negative;
    for (double r : daily_returns) {
        if (r < 0.0) negative.push_back(r);
    }
    if (negative.size() < 2) {
        throw std::runtime_error("sortino: downside deviation undefined (fewer than 2 negative days)");
    }
    const double downside = detail::sample_stdev(negative);
    if (downside == 0.0) throw std::runtime_error("sortino: downside deviation undefined (zero)");
    std::vector<double> excess(daily_returns.size());
    for (std::size_t i = 0; i < excess.size(); ++i) excess[i] = daily_returns[i] - daily_rf[i];
    return detail::mean_of(excess) / downside * std::sqrt(kTradingDaysPerYear);
}

// Per-year volatility and risk-reward ratios for one ledger; ratios are left
// absent where undefined.
inline std::vector<RiskRow> risk_report(const PortfolioLedger& ledger,
                                        const data::RiskFreeSeries& risk_free) {
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_year;
    for (const auto& entry : ledger.entries) {
        auto& [returns, rf] = by_year[entry.date.year()];
        returns.push_back(entry.daily_return);
        rf.push_back(risk_free.daily_rate_on(entry.date));
    }
    std::vector<RiskRow> rows;
    for (const auto& [year, series] : by_year) {
        const auto& [returns, rf] = series;
        if (returns.size() < 2) continue; // no meaningful risk stats on one day
        RiskRow row;
        row.year = year;
        row.annualized_volatility_percent = annualized_volatility(returns);
        try {
            row.sharpe = sharpe(returns, rf);
        } catch (const std::runtime_error&) {
        }
        try {
            row.sortino = sortino(returns, rf);
        } catch (const std::runtime_error&) {
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace finlstm::backtest
