#pragma once

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "finlstm/data/date.hpp"
#include "finlstm/data/tables.hpp"

namespace finlstm::data {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline std::string strip(std::string s) {
    auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

inline double parse_double(const std::string& text, std::size_t line_no, const char* what) {
    const std::string clean = strip(text);
    char* endp = nullptr;
    const double value = std::strtod(clean.c_str(), &endp);
    if (clean.empty() || endp != clean.c_str() + clean.size()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": malformed " + what + " '" +
                                 text + "'");
    }
    return value;
}

} // namespace detail

// Reads a `date,ticker,close` CSV into a rectangular panel. Dates on which
// any ticker lacks a price are dropped entirely; each dropped date is listed
// in `warnings`. Malformed rows, non-positive prices, and duplicate
// (date, ticker) cells are errors.
inline PriceTable load_prices(std::istream& in, std::vector<std::string>* warnings = nullptr) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error("price CSV is empty");
    ++line_no;
    {
        auto header = detail::split_csv_line(detail::strip(line));
        if (header.size() != 3 || detail::strip(header[0]) != "date" ||
            detail::strip(header[1]) != "ticker" || detail::strip(header[2]) != "close") {
            throw std::runtime_error("price CSV must start with header 'date,ticker,close'");
        }
    }

    std::map<Date, std::map<std::string, double>> cells;
    std::set<std::string> tickers;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::strip(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 3) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 3 fields 'date,ticker,close'");
        }
        Date date;
        try {
            date = Date::parse(detail::strip(fields[0]));
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
        const std::string ticker = detail::strip(fields[1]);
        if (ticker.empty()) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": empty ticker");
        }
        const double close = detail::parse_double(fields[2], line_no, "price");
        if (!(close > 0.0)) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": non-positive price for " +
                                     ticker + " on " + date.to_string());
        }
        auto [it, inserted] = cells[date].emplace(ticker, close);
        if (!inserted) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": duplicate entry for (" +
                                     date.to_string() + ", " + ticker + ")");
        }
        tickers.insert(ticker);
    }
    if (cells.empty()) throw std::runtime_error("price CSV has no data rows");

    PriceTable table;
    table.tickers.assign(tickers.begin(), tickers.end());
    std::vector<std::string> dropped;
    for (const auto& [date, row] : cells) {
        if (row.size() != table.tickers.size()) {
            dropped.push_back(date.to_string());
            continue;
        }
        table.dates.push_back(date);
        for (const auto& t : table.tickers) table.close.push_back(row.at(t));
    }
    if (!dropped.empty() && warnings) {
        std::string msg = "dropped " + std::to_string(dropped.size()) +
                          " date(s) with missing prices:";
        for (const auto& d : dropped) msg += " " + d;
        warnings->push_back(msg);
    }
    if (table.dates.empty()) {
        throw std::runtime_error("price CSV has no date with a complete ticker cross-section");
    }
    return table;
}

// Annualized risk-free rates (percent) keyed by date; `date,annual_rate_percent`.
struct RiskFreeSeries {
    std::vector<Date> dates;
    std::vector<double> annual_rate_percent;

    // Daily rate via annual% / 100 / 252, forward-filled from the most recent
    // observation on or before `date`; 0 before the first observation.
    double daily_rate_on(const Date& date) const {
        auto it = std::upper_bound(dates.begin(), dates.end(), date);
        if (it == dates.begin()) return 0.0;
        const std::size_t idx = static_cast<std::size_t>(it - dates.begin()) - 1;
        return annual_rate_percent[idx] / 100.0 / 252.0;
    }
};

inline RiskFreeSeries load_risk_free(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error("risk-free CSV is empty");
    ++line_no;
    {
        auto header = detail::split_csv_line(detail::strip(line));
        if (header.size() != 2 || detail::strip(header[0]) != "date" ||
            detail::strip(header[1]) != "annual_rate_percent") {
            throw std::runtime_error(
                "risk-free CSV must start with header 'date,annual_rate_percent'");
        }
    }
    std::map<Date, double> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::strip(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 2) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 2 fields 'date,annual_rate_percent'");
        }
        Date date;
        try {
            date = Date::parse(detail::strip(fields[0]));
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
        rows[date] = detail::parse_double(fields[1], line_no, "rate");
    }
    RiskFreeSeries series;
    for (const auto& [date, rate] : rows) {
        series.dates.push_back(date);
        series.annual_rate_percent.push_back(rate);
    }
    return series;
}

} // namespace finlstm::data
