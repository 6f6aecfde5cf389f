#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "finlstm/rng.hpp"
#include "finlstm/data/tables.hpp"
#include "finlstm/ensemble/ensemble.hpp"

namespace finlstm::backtest {

struct LedgerEntry {
    data::Date date;
    std::vector<std::string> holdings; // sorted tickers held this day
    double daily_return = 0.0;
    double cumulative_return = 0.0;
};

// Day-by-day record of an equal-weight portfolio: holdings, the mean of the
// holdings' realized returns (0 on empty days), and the compounded
// cumulative return.
struct PortfolioLedger {
    std::string name;
    std::vector<LedgerEntry> entries;

    std::vector<double> daily_returns() const {
        std::vector<double> r(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) r[i] = entries[i].daily_return;
        return r;
    }
};

namespace detail {

inline std::size_t date_index(const data::ReturnTable& returns, const data::Date& date) {
    auto it = std::lower_bound(returns.dates.begin(), returns.dates.end(), date);
    if (it == returns.dates.end() || *it != date) {
        throw std::runtime_error("no realized returns for date " + date.to_string());
    }
    return static_cast<std::size_t>(it - returns.dates.begin());
}

inline void finish_entry(PortfolioLedger& ledger, LedgerEntry entry, double& growth) {
    growth *= 1.0 + entry.daily_return;
    entry.cumulative_return = growth - 1.0;
    ledger.entries.push_back(std::move(entry));
}

} // namespace detail

// Turns buy/no-buy forecasts into the strategy ledger: on each forecast day,
// hold every buy-flagged ticker equal-weight; earn 0 (cash) when nothing is
// held. The ledger covers exactly the forecast days.
inline PortfolioLedger run_strategy(std::span<const ensemble::EnsembleForecast> forecasts,
                                    const data::ReturnTable& returns,
                                    std::string name = "lstm") {
    std::map<data::Date, std::vector<std::string>> buys_by_day;
    for (const auto& f : forecasts) {
        auto& day = buys_by_day[f.target_date]; // creates the day even if nothing is bought
        if (f.buy) day.push_back(f.ticker);
    }

    PortfolioLedger ledger;
    ledger.name = std::move(name);
    double growth = 1.0;
    for (auto& [date, holdings] : buys_by_day) {
        const std::size_t d = detail::date_index(returns, date);
        std::sort(holdings.begin(), holdings.end());
        LedgerEntry entry;
        entry.date = date;
        entry.holdings = holdings;
        if (!holdings.empty()) {
            double total = 0.0;
            for (const auto& ticker : holdings) total += returns.at(d, returns.ticker_index(ticker));
            entry.daily_return = total / static_cast<double>(holdings.size());
        }
        detail::finish_entry(ledger, std::move(entry), growth);
    }
    return ledger;
}

// Every ticker held every day.
inline PortfolioLedger all_stock_baseline(const data::ReturnTable& returns,
                                          std::span<const data::Date> days,
                                          std::string name = "all_stock") {
    PortfolioLedger ledger;
    ledger.name = std::move(name);
    std::vector<std::string> all = returns.tickers;
    std::sort(all.begin(), all.end());
    double growth = 1.0;
    for (const auto& date : days) {
        const std::size_t d = detail::date_index(returns, date);
        LedgerEntry entry;
        entry.date = date;
        entry.holdings = all;
        double total = 0.0;
        for (std::size_t k = 0; k < returns.n_tickers(); ++k) total += returns.at(d, k);
        entry.daily_return = total / static_cast<double>(returns.n_tickers());
        detail::finish_entry(ledger, std::move(entry), growth);
    }
    return ledger;
}

// Per day, a uniformly random holdings count K in {1..k}, then K tickers
// drawn uniformly without replacement. Ticker order is canonicalized (sorted)
// before drawing, so the result depends only on (returns, days, seed).
inline PortfolioLedger random_baseline(const data::ReturnTable& returns,
                                       std::span<const data::Date> days, std::uint64_t seed,
                                       std::string name = "random") {
    std::vector<std::string> universe = returns.tickers;
    std::sort(universe.begin(), universe.end());
    const std::size_t k = universe.size();
    if (k == 0) throw std::invalid_argument("random_baseline: no tickers");

    auto rng = stream_rng(seed, 0x72616e64ULL);
    std::uniform_int_distribution<std::size_t> count_dist(1, k);

    PortfolioLedger ledger;
    ledger.name = std::move(name);
    std::vector<std::size_t> indices(k);
    double growth = 1.0;
    for (const auto& date : days) {
        const std::size_t d = detail::date_index(returns, date);
        const std::size_t count = count_dist(rng);
        std::iota(indices.begin(), indices.end(), 0);
        // Partial Fisher-Yates: the first `count` slots become the draw.
        for (std::size_t i = 0; i < count; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, k - 1);
            std::swap(indices[i], indices[pick(rng)]);
        }
        LedgerEntry entry;
        entry.date = date;
        double total = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            entry.holdings.push_back(universe[indices[i]]);
            total += returns.at(d, returns.ticker_index(universe[indices[i]]));
        }
        std::sort(entry.holdings.begin(), entry.holdings.end());
        entry.daily_return = total / static_cast<double>(count);
        detail::finish_entry(ledger, std::move(entry), growth);
    }
    return ledger;
}

} // namespace finlstm::backtest
