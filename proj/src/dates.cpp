#include "orcast/dates.hpp"

#include <charconv>
#include <cstdio>

namespace orcast {

std::optional<Date> parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
        if (ec != std::errc{} || ptr != text.data() + pos + len) return std::nullopt;
        return v;
    };
    auto y = num(0, 4);
    auto m = num(5, 2);
    auto d = num(8, 2);
    if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
    Date date = make_date(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string format_iso_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

int days_in_month(int year, unsigned month) {
    using namespace std::chrono;
    return static_cast<int>(static_cast<unsigned>(
        year_month_day_last{std::chrono::year{year}, month_day_last{std::chrono::month{month}}}.day()));
}

}  // namespace orcast
