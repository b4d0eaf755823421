#include "orcast/ingest.hpp"

#include <algorithm>
#include <cctype>

#include <spdlog/spdlog.h>

#include "orcast/csv.hpp"
#include "orcast/errors.hpp"
#include "orcast/kv_config.hpp"

namespace orcast {

std::string_view to_string(OrangeType type) {
    return type == OrangeType::Valencia ? "VALENCIA" : "NON_VALENCIA";
}

std::optional<OrangeType> parse_orange_type(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (c != '_' && c != '-') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (s == "valencia") return OrangeType::Valencia;
    if (s == "nonvalencia") return OrangeType::NonValencia;
    return std::nullopt;
}

namespace {

struct TempleRow {
    double forecast = 0.0;
    double production = 0.0;
};

std::map<int, TempleRow> load_temples(const std::filesystem::path& path) {
    csv::Reader reader(path, {"season_year", "forecast_kboxes", "production_kboxes"});
    std::map<int, TempleRow> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const int year = static_cast<int>(reader.integer(f[0], "season_year"));
        TempleRow row{reader.real(f[1], "forecast_kboxes"), reader.real(f[2], "production_kboxes")};
        if (row.forecast < 0 || row.production < 0) {
            throw ValidationError(reader.name() + ":" + std::to_string(reader.line()) +
                                  ": temple boxes must be nonnegative");
        }
        if (!out.emplace(year, row).second) {
            throw ValidationError(reader.name() + ":" + std::to_string(reader.line()) +
                                  ": duplicate temple season " + std::to_string(year));
        }
    }
    return out;
}

}  // namespace

std::vector<SeasonRecord> load_forecast_history(const std::filesystem::path& path,
                                                const std::optional<std::filesystem::path>& temple_path) {
    csv::Reader reader(path, {"season_year", "orange_type", "forecast_kboxes", "production_kboxes"});
    std::vector<SeasonRecord> out;
    std::set<std::pair<int, OrangeType>> seen;
    std::vector<std::string> f;
    while (reader.next(f)) {
        SeasonRecord r;
        r.season_year = static_cast<int>(reader.integer(f[0], "season_year"));
        auto type = parse_orange_type(f[1]);
        if (!type || (f[1] != "VALENCIA" && f[1] != "NON_VALENCIA")) {
            throw ParseError(reader.name(), reader.line(), "orange_type must be VALENCIA or NON_VALENCIA");
        }
        r.orange_type = *type;
        r.forecast_boxes = reader.real(f[2], "forecast_kboxes");
        r.production_boxes = reader.real(f[3], "production_kboxes");
        const std::string where = reader.name() + ":" + std::to_string(reader.line());
        if (r.production_boxes <= 0) throw ValidationError(where + ": production_kboxes must be positive");
        if (r.forecast_boxes <= 0) throw ValidationError(where + ": forecast_kboxes must be positive");
        if (!seen.emplace(r.season_year, r.orange_type).second) {
            throw ValidationError(where + ": duplicate season " + std::to_string(r.season_year) + " " +
                                  std::string(to_string(r.orange_type)));
        }
        out.push_back(r);
    }

    if (temple_path) {
        const auto temples = load_temples(*temple_path);
        for (auto& r : out) {
            if (r.orange_type != OrangeType::NonValencia || r.season_year > kLastSeasonWithoutTemples) continue;
            auto it = temples.find(r.season_year);
            if (it == temples.end()) continue;
            r.forecast_boxes += it->second.forecast;
            r.production_boxes += it->second.production;
        }
        for (const auto& [year, row] : temples) {
            if (year > kLastSeasonWithoutTemples) {
                spdlog::warn("temple row for season {} ignored: non-Valencia series already includes temples",
                             year);
            }
        }
    } else {
        spdlog::debug("no temple file given; non-Valencia seasons loaded unadjusted");
    }

    for (auto& r : out) r.pct_error = percent_error(r.forecast_boxes, r.production_boxes);
    std::sort(out.begin(), out.end(), [](const SeasonRecord& a, const SeasonRecord& b) {
        return std::pair(a.orange_type, a.season_year) < std::pair(b.orange_type, b.season_year);
    });
    return out;
}

std::string format_forecast_history(const std::vector<SeasonRecord>& records) {
    std::string out = "season_year,orange_type,forecast_kboxes,production_kboxes\n";
    for (const auto& r : records) {
        out += std::to_string(r.season_year) + "," + std::string(to_string(r.orange_type)) + "," +
               csv::format_real(r.forecast_boxes) + "," + csv::format_real(r.production_boxes) + "\n";
    }
    return out;
}

std::vector<SeasonRecord> filter_type(const std::vector<SeasonRecord>& records, OrangeType type) {
    std::vector<SeasonRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [type](const SeasonRecord& r) { return r.orange_type == type; });
    return out;
}

std::vector<DailyWeatherRecord> load_weather(const std::filesystem::path& path) {
    csv::Reader reader(path, {"station_id", "county", "date", "tmin_c", "tmax_c", "precip_mm"});
    std::vector<DailyWeatherRecord> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        DailyWeatherRecord r;
        r.station_id = f[0];
        r.county = f[1];
        if (r.station_id.empty()) throw ParseError(reader.name(), reader.line(), "empty station_id");
        auto date = parse_iso_date(f[2]);
        if (!date) throw ParseError(reader.name(), reader.line(), "bad date `" + f[2] + "`");
        r.date = *date;
        r.tmin_c = reader.optional_real(f[3], "tmin_c");
        r.tmax_c = reader.optional_real(f[4], "tmax_c");
        r.precip_mm = reader.optional_real(f[5], "precip_mm");
        const std::string where = reader.name() + ":" + std::to_string(reader.line());
        if (r.tmin_c && r.tmax_c && *r.tmin_c > *r.tmax_c) throw ValidationError(where + ": tmin_c > tmax_c");
        if (r.precip_mm && *r.precip_mm < 0) throw ValidationError(where + ": negative precip_mm");
        out.push_back(std::move(r));
    }
    std::vector<std::size_t> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(out[a].station_id, out[a].date) < std::tie(out[b].station_id, out[b].date);
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        const auto& a = out[order[i - 1]];
        const auto& b = out[order[i]];
        if (a.station_id == b.station_id && a.date == b.date) {
            throw ValidationError(reader.name() + ": duplicate record for station " + a.station_id + " on " +
                                  format_iso_date(a.date));
        }
    }
    return out;
}

std::string format_weather(const std::vector<DailyWeatherRecord>& records) {
    std::string out = "station_id,county,date,tmin_c,tmax_c,precip_mm\n";
    for (const auto& r : records) {
        out += csv::join({r.station_id, r.county, format_iso_date(r.date), csv::format_optional(r.tmin_c),
                          csv::format_optional(r.tmax_c), csv::format_optional(r.precip_mm)});
        out += '\n';
    }
    return out;
}

std::map<std::string, std::string> select_station_per_county(const std::vector<DailyWeatherRecord>& records,
                                                             const std::vector<std::string>& counties,
                                                             const Date& window_start, const Date& window_end) {
    using std::chrono::sys_days;
    const long window_days = (sys_days{window_end} - sys_days{window_start}).count() + 1;
    if (window_days <= 0) throw ValidationError("station selection window is empty");

    // county -> station -> complete-day count within the window
    std::map<std::string, std::map<std::string, long>> complete;
    for (const auto& r : records) {
        auto& per_station = complete[r.county];
        auto& count = per_station[r.station_id];
        if (r.date >= window_start && r.date <= window_end && r.complete()) ++count;
    }

    std::map<std::string, std::string> out;
    std::vector<std::string> missing;
    for (const auto& county : counties) {
        auto it = complete.find(county);
        if (it == complete.end() || it->second.empty()) {
            missing.push_back(county);
            continue;
        }
        // std::map iterates ids in ascending order, so strict > keeps the smallest id on ties
        const std::string* best = nullptr;
        long best_count = -1;
        for (const auto& [station, count] : it->second) {
            if (count > best_count) {
                best = &station;
                best_count = count;
            }
        }
        spdlog::debug("county {}: station {} ({:.3f} complete)", county, *best,
                      static_cast<double>(best_count) / static_cast<double>(window_days));
        out[county] = *best;
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& c : missing) list += (list.empty() ? "" : ", ") + c;
        throw ValidationError("no weather station for county: " + list);
    }
    return out;
}

std::vector<PriceBar> load_price_history(const std::filesystem::path& path) {
    csv::Reader reader(path, {"date", "contract", "close_cents_per_lb"});
    std::vector<PriceBar> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        PriceBar bar;
        auto date = parse_iso_date(f[0]);
        if (!date) throw ParseError(reader.name(), reader.line(), "bad date `" + f[0] + "`");
        bar.date = *date;
        bar.contract = f[1];
        bar.close_cents_per_lb = reader.real(f[2], "close_cents_per_lb");
        const std::string where = reader.name() + ":" + std::to_string(reader.line());
        if (bar.close_cents_per_lb <= 0) throw ValidationError(where + ": close_cents_per_lb must be positive");
        if (!out.empty() && !(out.back().date < bar.date)) {
            throw ValidationError(where + ": date " + format_iso_date(bar.date) + " is not after " +
                                  format_iso_date(out.back().date));
        }
        out.push_back(std::move(bar));
    }
    return out;
}

std::string format_price_history(const std::vector<PriceBar>& bars) {
    std::string out = "date,contract,close_cents_per_lb\n";
    for (const auto& b : bars) {
        out += csv::join({format_iso_date(b.date), b.contract, csv::format_real(b.close_cents_per_lb)}) + "\n";
    }
    return out;
}

EventCalendar parse_event_calendar(const std::string& text, const std::string& origin) {
    const auto kv = KeyValueFile::parse(text, origin);
    EventCalendar cal;
    for (int y : kv.int_list("freeze_years")) cal.freeze_years.insert(y);
    for (int y : kv.int_list("hurricane_years")) cal.hurricane_years.insert(y);
    const std::string cg = kv.get("cg_from_year");
    if (!cg.empty() && cg != "none") cal.cg_from_year = static_cast<int>(kv.integer("cg_from_year"));
    return cal;
}

EventCalendar load_event_calendar(const std::filesystem::path& path) {
    return parse_event_calendar(csv::read_file(path), path.string());
}

std::string format_event_calendar(const EventCalendar& calendar) {
    auto list = [](const std::set<int>& s) {
        std::string out;
        for (int y : s) out += (out.empty() ? "" : ", ") + std::to_string(y);
        return out;
    };
    return "freeze_years = " + list(calendar.freeze_years) + "\nhurricane_years = " +
           list(calendar.hurricane_years) + "\ncg_from_year = " +
           (calendar.cg_from_year ? std::to_string(*calendar.cg_from_year) : std::string("none")) + "\n";
}

}  // namespace orcast
