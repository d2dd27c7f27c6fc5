#include "aircast/date.hpp"

#include "aircast/error.hpp"

#include <charconv>
#include <cstdio>

namespace aircast {

Date make_date(int year, unsigned month, unsigned day) {
    return Date{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
}

bool is_valid_date(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1 || day > 31) {
        return false;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    return ymd.ok();
}

std::string to_iso(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

Date parse_iso(std::string_view text) {
    auto field = [&](std::size_t pos, std::size_t len) {
        int value = 0;
        const auto* first = text.data() + pos;
        const auto [ptr, ec] = std::from_chars(first, first + len, value);
        if (ec != std::errc{} || ptr != first + len) {
            throw ParseError("malformed date '" + std::string(text) + "'");
        }
        return value;
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ParseError("malformed date '" + std::string(text) + "'");
    }
    const int year = field(0, 4);
    const int month = field(5, 2);
    const int day = field(8, 2);
    if (!is_valid_date(year, month, day)) {
        throw ParseError("invalid calendar date '" + std::string(text) + "'");
    }
    return make_date(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
}

} // namespace aircast
