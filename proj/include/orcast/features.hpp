#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orcast/dates.hpp"
#include "orcast/ingest.hpp"

namespace orcast::features {

enum class Phase { PreForecast, PostForecast };
enum class Quality { Ok, Imputed, Missing };

std::string_view to_string(Phase phase);    // PRE_FORECAST / POST_FORECAST
std::string_view to_string(Quality quality);  // ok / imputed / missing
std::optional<Phase> parse_phase(std::string_view text);

inline constexpr double kCoverageFloor = 0.9;
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FeatureValue {
    double value = kNaN;
    Quality quality = Quality::Missing;

    bool present() const { return quality != Quality::Missing; }
};

/// Inclusive calendar-day range.
struct Window {
    Date first;
    Date last;

    int days() const;
};

Window month_window(int year, unsigned month);
Window span_window(int year, unsigned first_month, unsigned last_month);

/// Dense per-day view of one station. Built from unordered records; later
/// duplicates for a date overwrite earlier ones (ingest already rejects those).
class StationSeries {
public:
    struct Day {
        std::optional<double> tmin;
        std::optional<double> tmax;
        std::optional<double> precip;

        std::optional<double> mean_temp() const {
            if (tmin && tmax) return (*tmin + *tmax) / 2.0;
            return std::nullopt;
        }
    };

    StationSeries() = default;
    StationSeries(std::string station_id, std::string county, std::span<const DailyWeatherRecord> records);

    /// Convenience for tests: consecutive days starting at `start`.
    static StationSeries from_days(const Date& start, std::span<const Day> days, std::string station_id = "S");

    const Day* at(const Date& date) const;
    const std::string& station_id() const { return station_id_; }
    const std::string& county() const { return county_; }
    bool empty() const { return days_.empty(); }
    int first_year() const;
    int last_year() const;

private:
    std::string station_id_;
    std::string county_;
    long origin_ = 0;  // sys_days count of days_[0]
    std::vector<Day> days_;
};

/// Days in `window` whose observed tmin is strictly below `threshold_c`.
/// Missing days are not counted; coverage below `coverage_floor` yields Missing.
FeatureValue count_days_below(const StationSeries& series, const Window& window, double threshold_c,
                              double coverage_floor = kCoverageFloor);

/// Longest run of consecutive days in `window` with (tmin+tmax)/2 strictly below
/// `threshold_c`. A missing day ends a run.
FeatureValue max_cold_run(const StationSeries& series, const Window& window, double threshold_c = 7.0,
                          double coverage_floor = kCoverageFloor);

enum class RainWindow { FebToApr, May };

/// Linear interpolation between order statistics (h = (n-1)p). Sorts a copy.
double percentile_linear(std::vector<double> values, double p);

/// Days in the target year's window with precipitation strictly above the station's
/// 75th percentile of all in-window days across its record (zeros included). If that
/// percentile is 0, the 75th percentile of the strictly positive values is used.
/// Requires at least five record years meeting the coverage floor.
FeatureValue rainfall_exceedance_days(const StationSeries& series, RainWindow window, int target_year,
                                      double coverage_floor = kCoverageFloor);

/// Monthly reference evapotranspiration, mm/day, keyed by month number.
using Et0Table = std::map<unsigned, double>;

/// Sum over June-August of max(0, kc*et0(month) - rain). A missing rain day counts as
/// a dry day and marks the value Imputed. Throws ConfigError for kc <= 0 or missing et0.
FeatureValue summer_deficit(const StationSeries& series, int year, double kc, const Et0Table& et0,
                            double coverage_floor = kCoverageFloor);

/// June-August rainfall total. Missing days are filled with the mean of observed days
/// (value marked Imputed).
FeatureValue summer_precip(const StationSeries& series, int year, double coverage_floor = kCoverageFloor);

struct FeatureParams {
    double kc = 0.9;
    Et0Table et0;
    double coverage_floor = kCoverageFloor;
    double max_missing_fraction = 0.3;  // rows above this are dropped
    std::vector<std::string> features;  // empty = every feature of the phase
};

/// Feature names computed for a phase, e.g. Jan4c, Febc, FMAQ75, JJA.
std::vector<std::string> feature_names(Phase phase);

/// Computes one named feature for the season labelled `season_year` (announcement in
/// season_year - 1).
FeatureValue compute_feature(const StationSeries& series, const std::string& feature, int season_year, Phase phase,
                             const FeatureParams& params);

/// Column label for a county: alphanumerics only ("Indian River" -> "IndianRiver").
std::string scope_label(std::string_view county);

enum class ColumnKind { Indicator, Climate };

struct ColumnInfo {
    std::string name;   // "Freezes" or "<scope>_<feature>"
    ColumnKind kind = ColumnKind::Climate;
    std::string scope;  // county label or cluster id; empty for indicators
    std::string feature;
};

inline const std::vector<std::string>& indicator_names() {
    static const std::vector<std::string> names{"Freezes", "Hurricanes", "Cg"};
    return names;
}

/// Season x predictor table. Missing cells hold NaN with Quality::Missing.
struct PredictorMatrix {
    Phase phase = Phase::PreForecast;
    std::vector<int> seasons;
    std::vector<ColumnInfo> columns;
    Eigen::MatrixXd values;
    std::vector<std::vector<Quality>> quality;  // [row][col]

    std::optional<std::size_t> column_index(std::string_view name) const;
    std::optional<std::size_t> row_index(int season_year) const;
    std::size_t rows() const { return seasons.size(); }
    std::size_t cols() const { return columns.size(); }
};

/// Sets (or adds) the Freezes/Hurricanes/Cg columns from the calendar.
void attach_indicators(PredictorMatrix& matrix, const EventCalendar& calendar);

/// Station-scope matrix: indicator columns followed by `<county>_<feature>` per station.
/// Seasons with more than `params.max_missing_fraction` missing climate cells are dropped.
PredictorMatrix build_predictor_matrix(const std::vector<int>& seasons, const std::vector<StationSeries>& stations,
                                       const EventCalendar& calendar, Phase phase, const FeatureParams& params);

/// Long-format export: `season_year,scope,phase,<features>`; the flags sibling has the
/// same layout with ok/imputed/missing cells.
std::string format_feature_table(const PredictorMatrix& matrix);
std::string format_feature_flags(const PredictorMatrix& matrix);

/// Sibling path for flags: `x.csv` -> `x.flags.csv`.
std::filesystem::path flags_path(const std::filesystem::path& table);

/// Reads a feature table (and its flags sibling when present) back into a matrix
/// without indicator columns.
PredictorMatrix load_feature_table(const std::filesystem::path& path);

}  // namespace orcast::features
