#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orcast/features.hpp"
#include "orcast/ingest.hpp"
#include "orcast/model_selection.hpp"
#include "orcast/prob_forecast.hpp"

namespace orcast::pipeline {

/// Every key accepted in a config file, with a one-line description (used for CLI help).
const std::vector<std::pair<std::string, std::string>>& config_keys();

/// Keys whose values are file paths (resolved against the config file's directory).
bool is_path_key(const std::string& key);

struct PipelineConfig {
    // data
    std::optional<std::filesystem::path> forecast, temple, weather, yields, prices, calendar;
    // features
    double kc = 0.9;
    features::Et0Table et0;
    double coverage_floor = features::kCoverageFloor;
    std::optional<Date> window_start, window_end;
    std::vector<std::string> counties;
    // clustering
    int k = 4;
    int restarts = 10;
    // model
    std::string preset = "nonvalencia_cluster";
    std::optional<double> alpha;
    std::vector<double> alpha_grid = locfit::default_alpha_grid();
    int degree = 1;
    locfit::EnumerationMode select_mode = locfit::EnumerationMode::DropOne;
    std::optional<std::vector<std::string>> select_mandatory, select_optional;
    // forecast
    std::optional<int> season;
    std::optional<OrangeType> type;
    int B = 1000;
    std::uint64_t seed = 1;
    forecast::Outlook outlook = forecast::Outlook::EqualChances;
    int outlook_sign = 1;
    std::optional<forecast::Tilt> tilt;
    // decision
    double tau = 5.0;
    double p_high = 0.9;
    double p_low = 0.1;
    int contract_lbs = 15000;
    unsigned announcement_day = 10;  // October
    // serve
    std::string host = "127.0.0.1";
    int port = 8080;

    /// Builds from raw key/value entries. Relative paths resolve against `base_dir`.
    /// Unknown keys and out-of-range values raise ConfigError.
    static PipelineConfig from_entries(const std::map<std::string, std::string>& entries,
                                       const std::filesystem::path& base_dir);

    /// Loads a key/value config file and applies `overrides` on top (override paths are
    /// taken relative to the current directory).
    static PipelineConfig load(const std::optional<std::filesystem::path>& path,
                               const std::map<std::string, std::string>& overrides = {});

    /// Orange type for type-specific commands: `type` if set, else the preset's type.
    OrangeType resolved_type() const;
    int required_season() const;
};

const std::vector<std::string>& subcommands();

/// Short artifact spelling: `valencia` / `nonvalencia`.
std::string type_slug(OrangeType type);

std::string features_file(features::Phase phase, locfit::PredictorScope scope);
std::string distribution_file(OrangeType type, int season);
std::string payoffs_file(OrangeType type);
std::string recommendation_file(OrangeType type, int season);
std::string model_file(const std::string& preset);

/// Runs one pipeline stage, reading upstream artifacts from and writing into `out_dir`.
/// `serve` blocks until the server stops. Throws orcast::Error subclasses on failure.
void run_subcommand(const std::string& name, const PipelineConfig& config, const std::filesystem::path& out_dir);

}  // namespace orcast::pipeline
