#include "orcast/pipeline.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "orcast/clustering.hpp"
#include "orcast/csv.hpp"
#include "orcast/decision.hpp"
#include "orcast/errors.hpp"
#include "orcast/regress_events.hpp"
#include "orcast/serve.hpp"
#include "orcast/synth.hpp"

namespace orcast::pipeline {

namespace fs = std::filesystem;
using features::Phase;
using locfit::PredictorScope;

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"ingest", "features", "cluster", "screen", "fit",  "select",
                                                "forecast", "gains",  "decide",  "synth",  "serve"};
    return names;
}

std::string type_slug(OrangeType type) { return type == OrangeType::Valencia ? "valencia" : "nonvalencia"; }

std::string features_file(Phase phase, PredictorScope scope) {
    return fmt::format("features_{}_{}.csv", phase == Phase::PreForecast ? "pre" : "post",
                       scope == PredictorScope::Station ? "station" : "cluster");
}

std::string distribution_file(OrangeType type, int season) {
    return fmt::format("distribution_{}_{}.json", type_slug(type), season);
}
std::string payoffs_file(OrangeType type) { return fmt::format("payoffs_{}.json", type_slug(type)); }
std::string recommendation_file(OrangeType type, int season) {
    return fmt::format("recommendation_{}_{}.json", type_slug(type), season);
}
std::string model_file(const std::string& preset) { return "model_" + preset + ".json"; }

namespace {

const fs::path& need(const std::optional<fs::path>& path, const char* key) {
    if (!path) throw ConfigError(fmt::format("config key `{}` is required for this command", key));
    if (!fs::exists(*path)) throw IoError(fmt::format("{} file not found: {}", key, path->string()));
    return *path;
}

fs::path artifact(const fs::path& out_dir, const std::string& name) {
    fs::path p = out_dir / name;
    if (!fs::exists(p)) throw IoError("missing upstream artifact: " + p.string());
    return p;
}

void write(const fs::path& out_dir, const std::string& name, const std::string& content) {
    csv::write_file(out_dir / name, content);
    spdlog::info("wrote {}", (out_dir / name).string());
}

std::vector<SeasonRecord> load_seasons(const fs::path& out_dir) {
    return load_forecast_history(artifact(out_dir, "seasons.csv"));
}

std::map<int, double> errors_for(const fs::path& out_dir, OrangeType type) {
    return events::errors_by_season(filter_type(load_seasons(out_dir), type));
}

EventCalendar calendar_of(const PipelineConfig& c) { return load_event_calendar(need(c.calendar, "calendar")); }

features::PredictorMatrix load_matrix(const fs::path& out_dir, Phase phase, PredictorScope scope,
                                      const EventCalendar& calendar) {
    auto m = features::load_feature_table(artifact(out_dir, features_file(phase, scope)));
    m.phase = phase;
    features::attach_indicators(m, calendar);
    return m;
}

void run_ingest(const PipelineConfig& c, const fs::path& out) {
    const auto seasons = load_forecast_history(need(c.forecast, "forecast"), c.temple);
    write(out, "seasons.csv", format_forecast_history(seasons));
    std::string errors = "season_year,orange_type,pct_error\n";
    for (const auto& s : seasons) {
        errors += fmt::format("{},{},{}\n", s.season_year, to_string(s.orange_type), csv::format_real(s.pct_error));
    }
    write(out, "errors.csv", errors);

    if (c.weather) {
        const auto weather = load_weather(need(c.weather, "weather"));
        if (weather.empty()) throw ValidationError("weather file has no rows");
        std::vector<std::string> counties = c.counties;
        if (counties.empty()) {
            std::set<std::string> all;
            for (const auto& r : weather) all.insert(r.county);
            counties.assign(all.begin(), all.end());
        }
        Date lo = weather.front().date, hi = weather.front().date;
        for (const auto& r : weather) {
            lo = std::min(lo, r.date);
            hi = std::max(hi, r.date);
        }
        const Date start = c.window_start.value_or(make_date(year_of(lo), 1, 1));
        const Date end = c.window_end.value_or(make_date(year_of(hi), 12, 31));
        const auto chosen = select_station_per_county(weather, counties, start, end);
        std::string text = "county,station_id\n";
        for (const auto& [county, station] : chosen) text += csv::join({county, station}) + "\n";
        write(out, "stations.csv", text);
    }
    if (c.prices) write(out, "prices.csv", format_price_history(load_price_history(need(c.prices, "prices"))));
}

std::map<std::string, std::string> load_station_choice(const fs::path& out) {
    csv::Reader reader(artifact(out, "stations.csv"), {"county", "station_id"});
    std::map<std::string, std::string> chosen;
    std::vector<std::string> f;
    while (reader.next(f)) chosen[f[0]] = f[1];
    return chosen;
}

void run_features(const PipelineConfig& c, const fs::path& out) {
    const auto seasons_records = load_seasons(out);
    const auto chosen = load_station_choice(out);
    const auto calendar = calendar_of(c);
    const auto weather = load_weather(need(c.weather, "weather"));

    std::set<int> season_set;
    for (const auto& s : seasons_records) season_set.insert(s.season_year);
    if (c.season) season_set.insert(*c.season);
    const std::vector<int> seasons(season_set.begin(), season_set.end());

    std::map<std::string, std::vector<DailyWeatherRecord>> by_station;
    std::set<std::string> wanted;
    for (const auto& [county, station] : chosen) wanted.insert(station);
    for (const auto& r : weather) {
        if (wanted.count(r.station_id)) by_station[r.station_id].push_back(r);
    }
    std::vector<features::StationSeries> stations;
    for (const auto& [county, station] : chosen) {
        auto it = by_station.find(station);
        if (it == by_station.end()) throw ValidationError("selected station " + station + " has no weather rows");
        stations.emplace_back(station, county, it->second);
    }

    features::FeatureParams params;
    params.kc = c.kc;
    params.et0 = c.et0;
    params.coverage_floor = c.coverage_floor;
    if (c.et0.empty()) spdlog::info("no et0 table configured; JJAdeficit not computed");
    for (Phase phase : {Phase::PreForecast, Phase::PostForecast}) {
        params.features = features::feature_names(phase);
        if (c.et0.empty()) std::erase(params.features, std::string("JJAdeficit"));
        const auto m = features::build_predictor_matrix(seasons, stations, calendar, phase, params);
        const std::string name = features_file(phase, PredictorScope::Station);
        write(out, name, features::format_feature_table(m));
        csv::write_file(features::flags_path(out / name), features::format_feature_flags(m));
    }
}

void run_cluster(const PipelineConfig& c, const fs::path& out) {
    const auto yields = clustering::load_county_yields(need(c.yields, "yields"));
    const auto assignment = clustering::cluster_counties(yields.series, c.k, c.seed, c.restarts);
    for (const auto& county : assignment.unscaled) spdlog::warn("county {} has a constant yield series", county);
    write(out, "clusters.csv", clustering::format_assignment(assignment));
    for (Phase phase : {Phase::PreForecast, Phase::PostForecast}) {
        const auto station_path = out / features_file(phase, PredictorScope::Station);
        if (!fs::exists(station_path)) {
            spdlog::info("{} not found; cluster features not built", station_path.string());
            continue;
        }
        auto stations = features::load_feature_table(station_path);
        stations.phase = phase;
        const auto clustered = clustering::aggregate_cluster_features(stations, assignment);
        const std::string name = features_file(phase, PredictorScope::Cluster);
        write(out, name, features::format_feature_table(clustered));
        csv::write_file(features::flags_path(out / name), features::format_feature_flags(clustered));
    }
}

std::vector<OrangeType> types_present(const std::vector<SeasonRecord>& seasons) {
    std::vector<OrangeType> out;
    for (auto t : {OrangeType::NonValencia, OrangeType::Valencia}) {
        if (std::any_of(seasons.begin(), seasons.end(), [&](const SeasonRecord& s) { return s.orange_type == t; })) {
            out.push_back(t);
        }
    }
    return out;
}

void run_screen(const PipelineConfig& c, const fs::path& out) {
    const auto seasons = load_seasons(out);
    const auto calendar = calendar_of(c);
    for (OrangeType type : types_present(seasons)) {
        const auto errors = events::errors_by_season(filter_type(seasons, type));
        const auto fit = events::fit_event_regression(errors, calendar);
        const std::string slug = type_slug(type);
        write(out, "events_" + slug + ".json", events::format_event_fit(fit));
        for (Phase phase : {Phase::PreForecast, Phase::PostForecast}) {
            for (PredictorScope scope : {PredictorScope::Station, PredictorScope::Cluster}) {
                const auto table = out / features_file(phase, scope);
                if (!fs::exists(table)) continue;
                auto m = features::load_feature_table(table);
                m.phase = phase;
                const std::string tag = fmt::format("{}_{}_{}", slug, phase == Phase::PreForecast ? "pre" : "post",
                                                    scope == PredictorScope::Station ? "station" : "cluster");
                const auto report = events::screen_predictors(fit.residuals, m);
                write(out, "screening_" + tag + ".csv", events::format_screening(report));
                for (std::size_t col = 0; col < m.cols(); ++col) {
                    if (m.columns[col].kind != features::ColumnKind::Climate) continue;
                    csv::write_file(out / ("scatter_" + tag) / (m.columns[col].name + ".csv"),
                                    events::format_scatter(fit.residuals, m, col));
                }
            }
        }
    }
}

/// Training target restricted to seasons before the target season, when one is set.
std::map<int, double> training_errors(const PipelineConfig& c, const fs::path& out, OrangeType type) {
    auto errors = errors_for(out, type);
    if (c.season) {
        for (auto it = errors.begin(); it != errors.end();) {
            it = it->first >= *c.season ? errors.erase(it) : std::next(it);
        }
    }
    return errors;
}

void run_fit(const PipelineConfig& c, const fs::path& out) {
    const auto preset = locfit::find_preset(c.preset);
    const auto calendar = calendar_of(c);
    const auto matrix = load_matrix(out, preset.phase, preset.scope, calendar);
    const auto y = training_errors(c, out, preset.orange_type);
    const auto design = locfit::make_design(matrix, y, preset.predictors);
    auto model = locfit::fit_locfit(design.x, design.y, c.alpha.value_or(preset.alpha), c.degree, preset.predictors,
                                    design.indicator);
    model.id = preset.name;
    model.seasons = design.seasons;
    write(out, model_file(preset.name), locfit::to_json(model));
}

void run_select(const PipelineConfig& c, const fs::path& out) {
    const auto preset = locfit::find_preset(c.preset);
    const auto calendar = calendar_of(c);
    const auto matrix = load_matrix(out, preset.phase, preset.scope, calendar);
    const auto y = training_errors(c, out, preset.orange_type);
    locfit::EnumerationOptions options;
    options.mode = c.select_mode;
    options.alpha_grid = c.alpha_grid;
    options.fixed_alpha = c.alpha;
    options.degree = c.degree;
    const auto mandatory = c.select_mandatory.value_or(std::vector<std::string>{});
    auto optional = c.select_optional.value_or(preset.predictors);
    std::erase_if(optional, [&](const std::string& v) {
        return std::find(mandatory.begin(), mandatory.end(), v) != mandatory.end();
    });
    const auto table = locfit::enumerate_models(matrix, y, mandatory, optional, options);
    for (const auto& s : table.skipped) spdlog::warn("select: skipped {}", s);
    write(out, "gcv_" + preset.name + ".csv", locfit::format_gcv_table(table));
}

void run_forecast(const PipelineConfig& c, const fs::path& out) {
    const int season = c.required_season();
    const auto preset = locfit::find_preset(c.preset);
    const auto model = locfit::from_json(csv::read_file(artifact(out, model_file(preset.name))));
    const auto calendar = calendar_of(c);
    const auto matrix = load_matrix(out, preset.phase, preset.scope, calendar);
    const auto row = matrix.row_index(season);
    if (!row) throw ValidationError(fmt::format("season {} has no row in {}", season,
                                                features_file(preset.phase, preset.scope)));
    std::vector<double> x0;
    for (const auto& name : model.predictors) {
        const auto col = matrix.column_index(name);
        if (!col) throw ValidationError("predictor " + name + " not in the feature table");
        if (matrix.quality[*row][*col] == features::Quality::Missing) {
            throw ValidationError(fmt::format("predictor {} is missing for season {}", name, season));
        }
        x0.push_back(matrix.values(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(*col)));
    }
    auto dist = forecast::bootstrap_distribution(model, x0, c.B, c.seed);
    dist.season_year = season;
    dist.orange_type = preset.orange_type;
    dist.tilt = c.tilt.value_or(forecast::outlook_tilt(c.outlook_sign, c.outlook));
    if (dist.degenerate) spdlog::warn("forecast: neighbourhood residuals are all zero; distribution is a point mass");
    write(out, distribution_file(preset.orange_type, season), forecast::to_json(dist));
}

void run_gains(const PipelineConfig& c, const fs::path& out) {
    const auto prices = load_price_history(artifact(out, "prices.csv"));
    const auto seasons = load_seasons(out);
    std::vector<OrangeType> types = c.type ? std::vector<OrangeType>{*c.type} : types_present(seasons);
    for (OrangeType type : types) {
        std::vector<Date> dates;
        for (const auto& s : filter_type(seasons, type)) {
            dates.push_back(make_date(s.season_year - 1, 10, c.announcement_day));
        }
        const auto payoffs = decision::estimate_payoffs(prices, dates, type, c.B, c.seed, c.contract_lbs);
        write(out, payoffs_file(type), decision::to_json(payoffs));
    }
}

void run_decide(const PipelineConfig& c, const fs::path& out) {
    const int season = c.required_season();
    const OrangeType type = c.resolved_type();
    const auto dist = forecast::distribution_from_json(csv::read_file(artifact(out, distribution_file(type, season))));
    const auto payoffs = decision::payoffs_from_json(csv::read_file(artifact(out, payoffs_file(type))));
    const decision::DecisionParams params{c.tau, c.p_high, c.p_low};
    const auto rec = decision::recommend(dist, payoffs, params, c.tilt.value_or(dist.tilt));
    write(out, recommendation_file(type, season), decision::to_json(rec));
}

}  // namespace

void run_subcommand(const std::string& name, const PipelineConfig& config, const fs::path& out_dir) {
    if (name == "synth") {
        synth::write_dataset(out_dir, config.seed);
        return;
    }
    if (name == "serve") {
        serve::run_server(out_dir, config.host, config.port,
                          {{"tau", config.tau}, {"p_high", config.p_high}, {"p_low", config.p_low}});
        return;
    }
    fs::create_directories(out_dir);
    if (name == "ingest") run_ingest(config, out_dir);
    else if (name == "features") run_features(config, out_dir);
    else if (name == "cluster") run_cluster(config, out_dir);
    else if (name == "screen") run_screen(config, out_dir);
    else if (name == "fit") run_fit(config, out_dir);
    else if (name == "select") run_select(config, out_dir);
    else if (name == "forecast") run_forecast(config, out_dir);
    else if (name == "gains") run_gains(config, out_dir);
    else if (name == "decide") run_decide(config, out_dir);
    else throw ConfigError("unknown subcommand `" + name + "`");
}

}  // namespace orcast::pipeline
