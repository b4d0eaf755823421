#include "orcast/features.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <spdlog/spdlog.h>

#include "orcast/csv.hpp"
#include "orcast/errors.hpp"

namespace orcast::features {

using std::chrono::sys_days;

std::string_view to_string(Phase phase) {
    return phase == Phase::PreForecast ? "PRE_FORECAST" : "POST_FORECAST";
}

std::string_view to_string(Quality quality) {
    switch (quality) {
        case Quality::Ok: return "ok";
        case Quality::Imputed: return "imputed";
        case Quality::Missing: return "missing";
    }
    return "missing";
}

std::optional<Phase> parse_phase(std::string_view text) {
    std::string s;
    for (char c : text) {
        if (c != '_' && c != '-') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (s == "preforecast" || s == "pre") return Phase::PreForecast;
    if (s == "postforecast" || s == "post") return Phase::PostForecast;
    return std::nullopt;
}

int Window::days() const { return static_cast<int>((sys_days{last} - sys_days{first}).count()) + 1; }

Window month_window(int year, unsigned month) {
    return {make_date(year, month, 1), make_date(year, month, static_cast<unsigned>(days_in_month(year, month)))};
}

Window span_window(int year, unsigned first_month, unsigned last_month) {
    return {make_date(year, first_month, 1),
            make_date(year, last_month, static_cast<unsigned>(days_in_month(year, last_month)))};
}

StationSeries::StationSeries(std::string station_id, std::string county,
                             std::span<const DailyWeatherRecord> records)
    : station_id_(std::move(station_id)), county_(std::move(county)) {
    if (records.empty()) return;
    long lo = sys_days{records.front().date}.time_since_epoch().count();
    long hi = lo;
    for (const auto& r : records) {
        const long d = sys_days{r.date}.time_since_epoch().count();
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    origin_ = lo;
    days_.resize(static_cast<std::size_t>(hi - lo + 1));
    for (const auto& r : records) {
        auto& day = days_[static_cast<std::size_t>(sys_days{r.date}.time_since_epoch().count() - lo)];
        day.tmin = r.tmin_c;
        day.tmax = r.tmax_c;
        day.precip = r.precip_mm;
    }
}

StationSeries StationSeries::from_days(const Date& start, std::span<const Day> days, std::string station_id) {
    StationSeries s;
    s.station_id_ = std::move(station_id);
    s.county_ = s.station_id_;
    s.origin_ = sys_days{start}.time_since_epoch().count();
    s.days_.assign(days.begin(), days.end());
    return s;
}

const StationSeries::Day* StationSeries::at(const Date& date) const {
    const long d = sys_days{date}.time_since_epoch().count() - origin_;
    if (d < 0 || d >= static_cast<long>(days_.size())) return nullptr;
    return &days_[static_cast<std::size_t>(d)];
}

int StationSeries::first_year() const {
    return year_of(Date{sys_days{std::chrono::days{origin_}}});
}

int StationSeries::last_year() const {
    return year_of(Date{sys_days{std::chrono::days{origin_ + static_cast<long>(days_.size()) - 1}}});
}

namespace {

template <typename Fn>
void for_each_day(const Window& window, Fn&& fn) {
    for (sys_days d = sys_days{window.first}; d <= sys_days{window.last}; d += std::chrono::days{1}) {
        fn(Date{d});
    }
}

bool covered(int observed, const Window& window, double floor) {
    return static_cast<double>(observed) >= floor * static_cast<double>(window.days()) - 1e-12;
}

}  // namespace

FeatureValue count_days_below(const StationSeries& series, const Window& window, double threshold_c,
                              double coverage_floor) {
    int observed = 0;
    int count = 0;
    for_each_day(window, [&](const Date& d) {
        const auto* day = series.at(d);
        if (!day || !day->tmin) return;
        ++observed;
        if (*day->tmin < threshold_c) ++count;
    });
    if (!covered(observed, window, coverage_floor)) return {};
    return {static_cast<double>(count), Quality::Ok};
}

FeatureValue max_cold_run(const StationSeries& series, const Window& window, double threshold_c,
                          double coverage_floor) {
    int observed = 0;
    int run = 0;
    int best = 0;
    for_each_day(window, [&](const Date& d) {
        const auto* day = series.at(d);
        const auto mean = day ? day->mean_temp() : std::nullopt;
        if (!mean) {
            run = 0;
            return;
        }
        ++observed;
        run = *mean < threshold_c ? run + 1 : 0;
        best = std::max(best, run);
    });
    if (!covered(observed, window, coverage_floor)) return {};
    return {static_cast<double>(best), Quality::Ok};
}

double percentile_linear(std::vector<double> values, double p) {
    if (values.empty()) return kNaN;
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

Window rain_window(RainWindow w, int year) {
    return w == RainWindow::FebToApr ? span_window(year, 2, 4) : month_window(year, 5);
}

}  // namespace

FeatureValue rainfall_exceedance_days(const StationSeries& series, RainWindow window, int target_year,
                                      double coverage_floor) {
    if (series.empty()) return {};
    std::vector<double> pool;
    int history_years = 0;
    for (int y = series.first_year(); y <= series.last_year(); ++y) {
        const Window w = rain_window(window, y);
        int observed = 0;
        for_each_day(w, [&](const Date& d) {
            const auto* day = series.at(d);
            if (day && day->precip) {
                ++observed;
                pool.push_back(*day->precip);
            }
        });
        if (covered(observed, w, coverage_floor)) ++history_years;
    }
    if (history_years < 5) return {};

    double q75 = percentile_linear(pool, 0.75);
    if (q75 == 0.0) {
        std::vector<double> positive;
        std::copy_if(pool.begin(), pool.end(), std::back_inserter(positive), [](double v) { return v > 0.0; });
        if (positive.empty()) return {};
        q75 = percentile_linear(std::move(positive), 0.75);
    }

    const Window target = rain_window(window, target_year);
    int observed = 0;
    int count = 0;
    for_each_day(target, [&](const Date& d) {
        const auto* day = series.at(d);
        if (!day || !day->precip) return;
        ++observed;
        if (*day->precip > q75) ++count;
    });
    if (!covered(observed, target, coverage_floor)) return {};
    return {static_cast<double>(count), Quality::Ok};
}

FeatureValue summer_deficit(const StationSeries& series, int year, double kc, const Et0Table& et0,
                            double coverage_floor) {
    if (!(kc > 0.0)) throw ConfigError("crop coefficient kc must be positive");
    for (unsigned m : {6U, 7U, 8U}) {
        if (!et0.count(m)) throw ConfigError("et0 table has no entry for month " + std::to_string(m));
    }
    const Window w = span_window(year, 6, 8);
    double total = 0.0;
    int observed = 0;
    for_each_day(w, [&](const Date& d) {
        const double need = kc * et0.at(month_of(d));
        const auto* day = series.at(d);
        const double rain = day && day->precip ? *day->precip : 0.0;
        if (day && day->precip) ++observed;
        total += std::max(0.0, need - rain);
    });
    if (!covered(observed, w, coverage_floor)) return {};
    return {total, observed == w.days() ? Quality::Ok : Quality::Imputed};
}

FeatureValue summer_precip(const StationSeries& series, int year, double coverage_floor) {
    const Window w = span_window(year, 6, 8);
    double total = 0.0;
    int observed = 0;
    for_each_day(w, [&](const Date& d) {
        const auto* day = series.at(d);
        if (day && day->precip) {
            total += *day->precip;
            ++observed;
        }
    });
    if (observed == 0 || !covered(observed, w, coverage_floor)) return {};
    if (observed == w.days()) return {total, Quality::Ok};
    return {total / observed * w.days(), Quality::Imputed};
}

namespace {

constexpr std::pair<const char*, unsigned> kWinterMonths[] = {
    {"Nov", 11}, {"Dec", 12}, {"Jan", 1}, {"Feb", 2}, {"Mar", 3}};

}  // namespace

std::vector<std::string> feature_names(Phase phase) {
    std::vector<std::string> out;
    for (const auto& [abbr, month] : kWinterMonths) {
        out.push_back(std::string(abbr) + "1c");
        out.push_back(std::string(abbr) + "4c");
        out.push_back(std::string(abbr) + "c");
    }
    if (phase == Phase::PreForecast) {
        out.insert(out.end(), {"FMAQ75", "MayQ75", "JJA", "JJAdeficit"});
    }
    return out;
}

FeatureValue compute_feature(const StationSeries& series, const std::string& feature, int season_year, Phase phase,
                             const FeatureParams& params) {
    const int announcement = season_year - 1;
    if (phase == Phase::PreForecast) {
        if (feature == "FMAQ75")
            return rainfall_exceedance_days(series, RainWindow::FebToApr, announcement, params.coverage_floor);
        if (feature == "MayQ75")
            return rainfall_exceedance_days(series, RainWindow::May, announcement, params.coverage_floor);
        if (feature == "JJA") return summer_precip(series, announcement, params.coverage_floor);
        if (feature == "JJAdeficit")
            return summer_deficit(series, announcement, params.kc, params.et0, params.coverage_floor);
    }
    for (const auto& [abbr, month] : kWinterMonths) {
        if (feature.rfind(abbr, 0) != 0) continue;
        const std::string rest = feature.substr(3);
        // Pre-forecast winter precedes the October announcement; post-forecast follows it.
        const int base = phase == Phase::PreForecast ? announcement : announcement + 1;
        const int year = month >= 11 ? base - 1 : base;
        const Window w = month_window(year, month);
        if (rest == "1c") return count_days_below(series, w, 1.0, params.coverage_floor);
        if (rest == "4c") return count_days_below(series, w, 4.0, params.coverage_floor);
        if (rest == "c") return max_cold_run(series, w, 7.0, params.coverage_floor);
    }
    throw ConfigError("unknown feature `" + feature + "` for phase " + std::string(to_string(phase)));
}

std::string scope_label(std::string_view county) {
    std::string out;
    for (char c : county) {
        if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(c);
    }
    return out;
}

std::optional<std::size_t> PredictorMatrix::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> PredictorMatrix::row_index(int season_year) const {
    auto it = std::find(seasons.begin(), seasons.end(), season_year);
    if (it == seasons.end()) return std::nullopt;
    return static_cast<std::size_t>(it - seasons.begin());
}

void attach_indicators(PredictorMatrix& matrix, const EventCalendar& calendar) {
    // Drop stale indicator columns, then prepend fresh ones.
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
        if (matrix.columns[c].kind != ColumnKind::Indicator) keep.push_back(c);
    }
    const auto n = static_cast<Eigen::Index>(matrix.rows());
    const auto names = indicator_names();
    Eigen::MatrixXd values(n, static_cast<Eigen::Index>(names.size() + keep.size()));
    std::vector<ColumnInfo> columns;
    for (const auto& name : names) columns.push_back({name, ColumnKind::Indicator, "", name});
    for (Eigen::Index r = 0; r < n; ++r) {
        const int y = matrix.seasons[static_cast<std::size_t>(r)];
        values(r, 0) = calendar.freeze(y);
        values(r, 1) = calendar.hurricane(y);
        values(r, 2) = calendar.greening(y);
    }
    std::vector<std::vector<Quality>> quality(matrix.rows());
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        quality[r].assign(names.size(), Quality::Ok);
        for (std::size_t k = 0; k < keep.size(); ++k) {
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(names.size() + k)) =
                matrix.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(keep[k]));
            quality[r].push_back(matrix.quality[r][keep[k]]);
        }
    }
    for (std::size_t k : keep) columns.push_back(matrix.columns[k]);
    matrix.columns = std::move(columns);
    matrix.values = std::move(values);
    matrix.quality = std::move(quality);
}

PredictorMatrix build_predictor_matrix(const std::vector<int>& seasons, const std::vector<StationSeries>& stations,
                                       const EventCalendar& calendar, Phase phase, const FeatureParams& params) {
    const auto wanted = params.features.empty() ? feature_names(phase) : params.features;

    std::vector<ColumnInfo> climate;
    std::vector<const StationSeries*> source;
    for (const auto& st : stations) {
        const std::string scope = scope_label(st.county().empty() ? st.station_id() : st.county());
        for (const auto& f : wanted) {
            climate.push_back({scope + "_" + f, ColumnKind::Climate, scope, f});
            source.push_back(&st);
        }
    }

    PredictorMatrix m;
    m.phase = phase;
    m.columns = climate;
    std::vector<std::vector<double>> rows;
    for (int season : std::set<int>(seasons.begin(), seasons.end())) {
        std::vector<double> vals;
        std::vector<Quality> qual;
        std::size_t missing = 0;
        for (std::size_t c = 0; c < climate.size(); ++c) {
            const auto v = compute_feature(*source[c], climate[c].feature, season, phase, params);
            vals.push_back(v.value);
            qual.push_back(v.quality);
            if (!v.present()) ++missing;
        }
        if (!climate.empty() &&
            static_cast<double>(missing) > params.max_missing_fraction * static_cast<double>(climate.size())) {
            spdlog::warn("season {} dropped: {} of {} climate features missing", season, missing, climate.size());
            continue;
        }
        m.seasons.push_back(season);
        rows.push_back(std::move(vals));
        m.quality.push_back(std::move(qual));
    }
    m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(climate.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < climate.size(); ++c) {
            m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    attach_indicators(m, calendar);
    return m;
}

namespace {

struct TableLayout {
    std::vector<std::string> scopes;
    std::vector<std::string> features;
};

TableLayout layout_of(const PredictorMatrix& matrix) {
    TableLayout t;
    for (const auto& c : matrix.columns) {
        if (c.kind == ColumnKind::Indicator) continue;
        if (std::find(t.scopes.begin(), t.scopes.end(), c.scope) == t.scopes.end()) t.scopes.push_back(c.scope);
        if (std::find(t.features.begin(), t.features.end(), c.feature) == t.features.end())
            t.features.push_back(c.feature);
    }
    return t;
}

template <typename Cell>
std::string format_long(const PredictorMatrix& matrix, Cell&& cell) {
    const auto layout = layout_of(matrix);
    std::string out = "season_year,scope,phase";
    for (const auto& f : layout.features) out += "," + f;
    out += "\n";
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        for (const auto& scope : layout.scopes) {
            out += std::to_string(matrix.seasons[r]) + "," + csv::escape(scope) + "," +
                   std::string(to_string(matrix.phase));
            for (const auto& f : layout.features) {
                out += ",";
                if (auto c = matrix.column_index(scope + "_" + f)) out += cell(r, *c);
            }
            out += "\n";
        }
    }
    return out;
}

}  // namespace

std::string format_feature_table(const PredictorMatrix& matrix) {
    return format_long(matrix, [&](std::size_t r, std::size_t c) {
        if (matrix.quality[r][c] == Quality::Missing) return std::string{};
        return csv::format_real(matrix.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    });
}

std::string format_feature_flags(const PredictorMatrix& matrix) {
    return format_long(matrix,
                       [&](std::size_t r, std::size_t c) { return std::string(to_string(matrix.quality[r][c])); });
}

std::filesystem::path flags_path(const std::filesystem::path& table) {
    auto p = table;
    p.replace_extension(".flags.csv");
    return p;
}

PredictorMatrix load_feature_table(const std::filesystem::path& path) {
    csv::Reader reader(path, {});
    const auto header = reader.header();
    if (header.size() < 3 || header[0] != "season_year" || header[1] != "scope" || header[2] != "phase") {
        throw ParseError(reader.name(), 1, "feature table header must start with season_year,scope,phase");
    }
    const std::vector<std::string> feats(header.begin() + 3, header.end());

    std::map<std::pair<int, std::string>, std::vector<std::optional<double>>> cells;
    std::vector<std::string> scopes;
    std::set<int> seasons;
    std::optional<Phase> phase;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const int season = static_cast<int>(reader.integer(f[0], "season_year"));
        auto ph = parse_phase(f[2]);
        if (!ph) throw ParseError(reader.name(), reader.line(), "bad phase `" + f[2] + "`");
        if (phase && *phase != *ph) throw ParseError(reader.name(), reader.line(), "mixed phases in one table");
        phase = ph;
        if (std::find(scopes.begin(), scopes.end(), f[1]) == scopes.end()) scopes.push_back(f[1]);
        seasons.insert(season);
        std::vector<std::optional<double>> row;
        for (std::size_t k = 3; k < f.size(); ++k) row.push_back(reader.optional_real(f[k], header[k]));
        if (!cells.emplace(std::pair(season, f[1]), std::move(row)).second) {
            throw ParseError(reader.name(), reader.line(), "duplicate season/scope row");
        }
    }

    std::map<std::pair<int, std::string>, std::vector<std::string>> flags;
    if (const auto fp = flags_path(path); std::filesystem::exists(fp)) {
        csv::Reader fr(fp, header);
        while (fr.next(f)) {
            flags[{static_cast<int>(fr.integer(f[0], "season_year")), f[1]}] =
                std::vector<std::string>(f.begin() + 3, f.end());
        }
    }

    PredictorMatrix m;
    m.phase = phase.value_or(Phase::PreForecast);
    m.seasons.assign(seasons.begin(), seasons.end());
    for (const auto& s : scopes) {
        for (const auto& ft : feats) m.columns.push_back({s + "_" + ft, ColumnKind::Climate, s, ft});
    }
    m.values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()), kNaN);
    m.quality.assign(m.rows(), std::vector<Quality>(m.cols(), Quality::Missing));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t si = 0; si < scopes.size(); ++si) {
            auto it = cells.find({m.seasons[r], scopes[si]});
            if (it == cells.end()) continue;
            auto fl = flags.find({m.seasons[r], scopes[si]});
            for (std::size_t k = 0; k < feats.size(); ++k) {
                const std::size_t c = si * feats.size() + k;
                const auto& cell = it->second[k];
                if (!cell) continue;
                m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *cell;
                Quality q = Quality::Ok;
                if (fl != flags.end() && fl->second[k] == "imputed") q = Quality::Imputed;
                m.quality[r][c] = q;
            }
        }
    }
    return m;
}

}  // namespace orcast::features
