#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace orcast {

using Date = std::chrono::year_month_day;

/// Parses `YYYY-MM-DD`; returns nullopt for anything else, including impossible dates.
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_iso_date(const Date& date);

int days_in_month(int year, unsigned month);

inline int year_of(const Date& d) { return static_cast<int>(d.year()); }
inline unsigned month_of(const Date& d) { return static_cast<unsigned>(d.month()); }

inline Date make_date(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

inline Date add_days(const Date& d, int n) {
    return Date{std::chrono::sys_days{d} + std::chrono::days{n}};
}

}  // namespace orcast
