#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "orcast/dates.hpp"

namespace orcast {

enum class OrangeType { Valencia, NonValencia };

/// `VALENCIA` / `NON_VALENCIA`, the spelling used in forecast files.
std::string_view to_string(OrangeType type);

/// Accepts the file spelling plus the short CLI forms `valencia` / `nonvalencia`.
std::optional<OrangeType> parse_orange_type(std::string_view text);

/// Signed forecast error in percent of final production; positive means the
/// October forecast overestimated the crop.
inline double percent_error(double forecast_boxes, double production_boxes) {
    return 100.0 * (forecast_boxes - production_boxes) / production_boxes;
}

/// One crop season. `season_year` is the July production year; the October forecast
/// was issued in `season_year - 1`.
struct SeasonRecord {
    int season_year = 0;
    OrangeType orange_type = OrangeType::NonValencia;
    double forecast_boxes = 0.0;    // thousand boxes
    double production_boxes = 0.0;  // thousand boxes
    double pct_error = 0.0;
};

/// Last season whose non-Valencia series excludes temples.
inline constexpr int kLastSeasonWithoutTemples = 2005;

/// Loads `season_year,orange_type,forecast_kboxes,production_kboxes`. When
/// `temple_path` is given, its forecast and production are added to the non-Valencia
/// rows of overlapping seasons up to kLastSeasonWithoutTemples.
std::vector<SeasonRecord> load_forecast_history(const std::filesystem::path& path,
                                                const std::optional<std::filesystem::path>& temple_path = {});

/// Serializes in the forecast-file schema, so reloading reproduces the records.
std::string format_forecast_history(const std::vector<SeasonRecord>& records);

std::vector<SeasonRecord> filter_type(const std::vector<SeasonRecord>& records, OrangeType type);

struct DailyWeatherRecord {
    std::string station_id;
    std::string county;
    Date date;
    std::optional<double> tmin_c;
    std::optional<double> tmax_c;
    std::optional<double> precip_mm;

    bool complete() const { return tmin_c && tmax_c && precip_mm; }
};

/// Loads `station_id,county,date,tmin_c,tmax_c,precip_mm`. Rejects tmin > tmax,
/// negative precipitation, and duplicate (station, date) rows.
std::vector<DailyWeatherRecord> load_weather(const std::filesystem::path& path);

std::string format_weather(const std::vector<DailyWeatherRecord>& records);

/// Picks, per county, the station with the largest fraction of days in
/// [window_start, window_end] that have tmin, tmax and precipitation all present.
/// Ties go to the lexicographically smallest station id. Throws ValidationError
/// naming every requested county that has no station.
std::map<std::string, std::string> select_station_per_county(const std::vector<DailyWeatherRecord>& records,
                                                             const std::vector<std::string>& counties,
                                                             const Date& window_start, const Date& window_end);

struct PriceBar {
    Date date;
    std::string contract;  // nearest-to-maturity contract on that date
    double close_cents_per_lb = 0.0;
};

/// Loads `date,contract,close_cents_per_lb`. The file is a continuous
/// nearest-to-maturity series, one bar per trading day, in strictly increasing date order.
std::vector<PriceBar> load_price_history(const std::filesystem::path& path);

std::string format_price_history(const std::vector<PriceBar>& bars);

struct EventCalendar {
    std::set<int> freeze_years;
    std::set<int> hurricane_years;
    std::optional<int> cg_from_year;

    int freeze(int season_year) const { return freeze_years.count(season_year) ? 1 : 0; }
    int hurricane(int season_year) const { return hurricane_years.count(season_year) ? 1 : 0; }
    int greening(int season_year) const { return cg_from_year && season_year >= *cg_from_year ? 1 : 0; }
};

/// Reads `freeze_years`, `hurricane_years` and `cg_from_year` from a key/value file.
/// `cg_from_year = none` (or an empty value) disables the greening indicator.
EventCalendar load_event_calendar(const std::filesystem::path& path);
EventCalendar parse_event_calendar(const std::string& text, const std::string& origin = "calendar");
std::string format_event_calendar(const EventCalendar& calendar);

}  // namespace orcast
