#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "finlstm/data/date.hpp"

namespace finlstm::data {

// Rectangular close-price panel: one row per date, one column per ticker.
// Every retained (date, ticker) cell is populated and positive.
struct PriceTable {
    std::vector<Date> dates;           // strictly increasing
    std::vector<std::string> tickers;  // canonical (sorted) order
    std::vector<double> close;         // dates.size() x tickers.size(), row-major

    std::size_t n_dates() const { return dates.size(); }
    std::size_t n_tickers() const { return tickers.size(); }
    double at(std::size_t date_idx, std::size_t ticker_idx) const {
        return close[date_idx * tickers.size() + ticker_idx];
    }
    double& at(std::size_t date_idx, std::size_t ticker_idx) {
        return close[date_idx * tickers.size() + ticker_idx];
    }
};

// Daily simple returns R_t = p_t / p_{t-1} - 1. One fewer row than the
// price table it came from.
struct ReturnTable {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    std::vector<double> returns; // dates.size() x tickers.size(), row-major

    std::size_t n_dates() const { return dates.size(); }
    std::size_t n_tickers() const { return tickers.size(); }
    double at(std::size_t date_idx, std::size_t ticker_idx) const {
        return returns[date_idx * tickers.size() + ticker_idx];
    }
    double& at(std::size_t date_idx, std::size_t ticker_idx) {
        return returns[date_idx * tickers.size() + ticker_idx];
    }
    std::size_t ticker_index(const std::string& ticker) const {
        auto it = std::find(tickers.begin(), tickers.end(), ticker);
        if (it == tickers.end()) throw std::invalid_argument("unknown ticker: " + ticker);
        return static_cast<std::size_t>(it - tickers.begin());
    }
};

// Binary above/below-median targets plus the per-date median itself.
struct LabelTable {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    std::vector<std::uint8_t> labels; // dates x tickers, row-major, values {0,1}
    std::vector<double> medians;      // one per date

    std::uint8_t at(std::size_t date_idx, std::size_t ticker_idx) const {
        return labels[date_idx * tickers.size() + ticker_idx];
    }
};

inline double median_of(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median_of: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size();
    if (k % 2 == 1) return values[k / 2];
    return 0.5 * (values[k / 2 - 1] + values[k / 2]);
}

// Per-ticker returns divided by each date's cross-sectional median; a stock
// is labeled 1 only when its return is strictly above the median.
inline LabelTable label_by_median(const ReturnTable& table) {
    if (table.n_tickers() == 0) throw std::invalid_argument("label_by_median: no tickers");
    LabelTable labels;
    labels.dates = table.dates;
    labels.tickers = table.tickers;
    labels.labels.resize(table.n_dates() * table.n_tickers());
    labels.medians.resize(table.n_dates());

    std::vector<double> day(table.n_tickers());
    for (std::size_t d = 0; d < table.n_dates(); ++d) {
        for (std::size_t k = 0; k < table.n_tickers(); ++k) day[k] = table.at(d, k);
        const double median = median_of(day);
        labels.medians[d] = median;
        for (std::size_t k = 0; k < table.n_tickers(); ++k) {
            labels.labels[d * table.n_tickers() + k] = table.at(d, k) > median ? 1 : 0;
        }
    }
    return labels;
}

inline ReturnTable compute_returns(const PriceTable& prices) {
    if (prices.n_dates() < 2) {
        throw std::invalid_argument("compute_returns: need at least 2 dates");
    }
    ReturnTable table;
    table.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    table.tickers = prices.tickers;
    table.returns.resize(table.n_dates() * table.n_tickers());
    for (std::size_t d = 1; d < prices.n_dates(); ++d) {
        for (std::size_t k = 0; k < prices.n_tickers(); ++k) {
            table.returns[(d - 1) * table.n_tickers() + k] =
                prices.at(d, k) / prices.at(d - 1, k) - 1.0;
        }
    }
    return table;
}

} // namespace finlstm::data
