#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace finlstm::data {

// Calendar date with ISO-8601 parsing/formatting and day arithmetic
// (proleptic Gregorian, via the usual days-from-civil construction).
class Date {
public:
    Date() = default;
    Date(int year, int month, int day) : year_(year), month_(month), day_(day) {
        if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
            throw std::invalid_argument("invalid calendar date");
        }
    }

    static Date parse(std::string_view text) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
            throw std::invalid_argument("invalid ISO-8601 date: " + std::string(text));
        }
        auto parse_int = [&](std::string_view part) {
            int value = 0;
            auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
            if (ec != std::errc() || p != part.data() + part.size()) {
                throw std::invalid_argument("invalid ISO-8601 date: " + std::string(text));
            }
            return value;
        };
        return Date(parse_int(text.substr(0, 4)), parse_int(text.substr(5, 2)),
                    parse_int(text.substr(8, 2)));
    }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year_, month_, day_);
        return buf;
    }

    int year() const { return year_; }
    int month() const { return month_; }
    int day() const { return day_; }

    // Days since 1970-01-01.
    long long serial() const {
        long long y = year_;
        const int m = month_;
        y -= m <= 2 ? 1 : 0;
        const long long era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + day_ - 1;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return era * 146097 + static_cast<long long>(doe) - 719468;
    }

    static Date from_serial(long long serial) {
        serial += 719468;
        const long long era = (serial >= 0 ? serial : serial - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(serial - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const long long y = static_cast<long long>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        return Date(static_cast<int>(y + (m <= 2 ? 1 : 0)), static_cast<int>(m),
                    static_cast<int>(d));
    }

    Date next_day() const { return from_serial(serial() + 1); }

    auto operator<=>(const Date&) const = default;

private:
    static int days_in_month(int year, int month) {
        static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        if (month == 2) {
            const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
            return leap ? 29 : 28;
        }
        return lengths[month - 1];
    }

    int year_ = 1970;
    int month_ = 1;
    int day_ = 1;
};

} // namespace finlstm::data
