#pragma once

#include <span>
#include <string>
#include <vector>

#include "finlstm/backtest/ledger.hpp"
#include "finlstm/backtest/stats.hpp"
#include "finlstm/ensemble/ensemble.hpp"

namespace finlstm::backtest {

struct SweepRow {
    std::string variable;
    double value = 0.0;
    double mean_daily_return_percent = 0.0;
    double mean_holdings_count = 0.0;
};

namespace detail {

inline SweepRow evaluate_point(const ensemble::ConfidenceTable& outputs,
                               const data::ReturnTable& returns, int threshold,
                               double min_confidence, std::string variable, double value) {
    const auto forecasts = ensemble::forecasts_from(outputs, threshold, min_confidence);
    const PortfolioLedger ledger = run_strategy(forecasts, returns);
    double return_total = 0.0;
    double holdings_total = 0.0;
    for (const auto& entry : ledger.entries) {
        return_total += entry.daily_return;
        holdings_total += static_cast<double>(entry.holdings.size());
    }
    const double days = static_cast<double>(ledger.entries.size());
    SweepRow row;
    row.variable = std::move(variable);
    row.value = value;
    row.mean_daily_return_percent = days > 0.0 ? return_total / days * 100.0 : 0.0;
    row.mean_holdings_count = days > 0.0 ? holdings_total / days : 0.0;
    return row;
}

} // namespace detail

// Re-votes the persisted member outputs at every threshold 1..11 (no
// retraining) and reports the resulting mean daily return and holdings count.
inline std::vector<SweepRow> sweep_threshold(const ensemble::ConfidenceTable& outputs,
                                             const data::ReturnTable& returns,
                                             double min_confidence = 0.5) {
    std::vector<SweepRow> rows;
    for (int threshold = 1; threshold <= static_cast<int>(ensemble::kMembers); ++threshold) {
        rows.push_back(detail::evaluate_point(outputs, returns, threshold, min_confidence,
                                              "threshold", static_cast<double>(threshold)));
    }
    return rows;
}

// Same sweep over a grid of per-member confidence floors at a fixed threshold.
inline std::vector<SweepRow> sweep_min_confidence(const ensemble::ConfidenceTable& outputs,
                                                  const data::ReturnTable& returns, int threshold,
                                                  std::span<const double> grid) {
    std::vector<SweepRow> rows;
    for (double floor : grid) {
        rows.push_back(
            detail::evaluate_point(outputs, returns, threshold, floor, "min_confidence", floor));
    }
    return rows;
}

} // namespace finlstm::backtest
