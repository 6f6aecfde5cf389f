#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finlstm/backtest/ledger.hpp"
#include "finlstm/backtest/stats.hpp"
#include "finlstm/backtest/sweep.hpp"
#include "finlstm/data/csv.hpp"
#include "finlstm/data/synth.hpp"
#include "finlstm/ensemble/ensemble.hpp"

namespace finlstm::cli {

// Shortest exact decimal form; round-trips to the same double.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << contents;
    if (!out) throw std::runtime_error("failed writing file: " + path);
}

inline std::string prices_csv_text(const data::PriceTable& prices) {
    std::ostringstream out;
    out << "date,ticker,close\n";
    for (std::size_t d = 0; d < prices.n_dates(); ++d) {
        for (std::size_t k = 0; k < prices.n_tickers(); ++k) {
            out << prices.dates[d].to_string() << ',' << prices.tickers[k] << ','
                << fmt_double(prices.at(d, k)) << '\n';
        }
    }
    return out.str();
}

inline std::string truth_csv_text(const data::LabelTable& truth) {
    std::ostringstream out;
    out << "date,ticker,true_label\n";
    for (std::size_t d = 0; d < truth.dates.size(); ++d) {
        for (std::size_t k = 0; k < truth.tickers.size(); ++k) {
            out << truth.dates[d].to_string() << ',' << truth.tickers[k] << ','
                << static_cast<int>(truth.at(d, k)) << '\n';
        }
    }
    return out.str();
}

inline std::string ledger_csv_text(const backtest::PortfolioLedger& ledger) {
    std::ostringstream out;
    out << "date,portfolio,holdings_count,holdings,daily_return,cumulative_return\n";
    for (const auto& entry : ledger.entries) {
        out << entry.date.to_string() << ',' << ledger.name << ',' << entry.holdings.size() << ',';
        for (std::size_t i = 0; i < entry.holdings.size(); ++i) {
            out << (i == 0 ? "" : ";") << entry.holdings[i];
        }
        out << ',' << fmt_double(entry.daily_return) << ',' << fmt_double(entry.cumulative_return)
            << '\n';
    }
    return out.str();
}

inline std::string accuracy_log_csv_text(std::span<const ensemble::AccuracyRecord> records,
                                         std::span<const data::Date> block_starts,
                                         const ensemble::EnsembleConfig& config) {
    std::ostringstream out;
    out << "block_start,member_index,scheme,test_accuracy\n";
    for (const auto& record : records) {
        out << block_starts[record.block_index].to_string() << ',' << record.member_index << ','
            << nn::scheme_name(config.member_schemes[record.member_index]) << ','
            << fmt_double(record.test_accuracy) << '\n';
    }
    return out.str();
}

inline std::string member_outputs_csv_text(std::span<const ensemble::MemberOutput> outputs) {
    // Canonical order: date, ticker, member.
    std::map<data::Date, std::map<std::string, std::map<int, double>>> sorted;
    for (const auto& out : outputs) {
        sorted[out.target_date][out.ticker][out.member_index] = out.confidence;
    }
    std::ostringstream out;
    out << "date,ticker,member_index,confidence\n";
    for (const auto& [date, row] : sorted) {
        for (const auto& [ticker, members] : row) {
            for (const auto& [member, confidence] : members) {
                out << date.to_string() << ',' << ticker << ',' << member << ','
                    << fmt_double(confidence) << '\n';
            }
        }
    }
    return out.str();
}

inline std::vector<ensemble::MemberOutput> read_member_outputs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open member outputs file: " + path);
    std::string line;
    if (!std::getline(in, line) ||
        data::detail::strip(line) != "date,ticker,member_index,confidence") {
        throw std::runtime_error("bad member outputs header in " + path);
    }
    std::vector<ensemble::MemberOutput> outputs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (data::detail::strip(line).empty()) continue;
        auto fields = data::detail::split_csv_line(line);
        if (fields.size() != 4) {
            throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                     ": expected 4 fields");
        }
        ensemble::MemberOutput out;
        out.target_date = data::Date::parse(data::detail::strip(fields[0]));
        out.ticker = data::detail::strip(fields[1]);
        out.member_index =
            static_cast<int>(data::detail::parse_double(fields[2], line_no, "member index"));
        out.confidence = data::detail::parse_double(fields[3], line_no, "confidence");
        outputs.push_back(std::move(out));
    }
    return outputs;
}

inline std::string sweep_csv_text(std::span<const backtest::SweepRow> rows) {
    std::ostringstream out;
    out << "variable,value,mean_daily_return_percent,mean_holdings_count\n";
    for (const auto& row : rows) {
        out << row.variable << ',' << fmt_double(row.value) << ','
            << fmt_double(row.mean_daily_return_percent) << ','
            << fmt_double(row.mean_holdings_count) << '\n';
    }
    return out.str();
}

inline std::string cumulative_csv_text(const backtest::PortfolioLedger& strategy,
                                       const backtest::PortfolioLedger& all_stock,
                                       const backtest::PortfolioLedger& random) {
    std::ostringstream out;
    out << "date,lstm,all_stock,random\n";
    for (std::size_t i = 0; i < strategy.entries.size(); ++i) {
        out << strategy.entries[i].date.to_string() << ','
            << fmt_double(strategy.entries[i].cumulative_return) << ','
            << fmt_double(all_stock.entries[i].cumulative_return) << ','
            << fmt_double(random.entries[i].cumulative_return) << '\n';
    }
    return out.str();
}

namespace detail {

inline nlohmann::json stats_to_json(const backtest::ReturnStats& stats) {
    nlohmann::json j;
    j["mean_percent"] = stats.mean_percent;
    if (stats.stdev_percent) j["stdev_percent"] = *stats.stdev_percent;
    else j["stdev_percent"] = nullptr;
    j["min_percent"] = stats.min_percent;
    j["max_percent"] = stats.max_percent;
    j["n_days"] = stats.n_days;
    return j;
}

} // namespace detail

inline nlohmann::json portfolio_report_json(const backtest::PortfolioLedger& ledger,
                                            const data::RiskFreeSeries& risk_free) {
    nlohmann::json j;
    j["overall"] = detail::stats_to_json(backtest::daily_stats(ledger));
    j["yearly"] = nlohmann::json::array();
    for (const auto& row : backtest::yearly_stats(ledger)) {
        nlohmann::json y = detail::stats_to_json(row.stats);
        y["year"] = row.year;
        j["yearly"].push_back(std::move(y));
    }
    j["risk"] = nlohmann::json::array();
    for (const auto& row : backtest::risk_report(ledger, risk_free)) {
        nlohmann::json r;
        r["year"] = row.year;
        r["annualized_volatility_percent"] = row.annualized_volatility_percent;
        r["sharpe"] = row.sharpe ? nlohmann::json(*row.sharpe) : nlohmann::json(nullptr);
        r["sortino"] = row.sortino ? nlohmann::json(*row.sortino) : nlohmann::json(nullptr);
        j["risk"].push_back(std::move(r));
    }
    return j;
}

} // namespace finlstm::cli
