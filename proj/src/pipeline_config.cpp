#include <algorithm>
#include <charconv>

#include <fmt/format.h>

#include "orcast/csv.hpp"
#include "orcast/errors.hpp"
#include "orcast/kv_config.hpp"
#include "orcast/pipeline.hpp"

namespace orcast::pipeline {

const std::vector<std::pair<std::string, std::string>>& config_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys{
        {"forecast", "forecast/production history CSV"},
        {"temple", "temple orange CSV added to non-Valencia seasons"},
        {"weather", "daily weather CSV"},
        {"yields", "county yield CSV (county,year,yield)"},
        {"prices", "FCOJ nearest-to-maturity closes CSV"},
        {"calendar", "event calendar file"},
        {"kc", "crop coefficient for the summer deficit"},
        {"et0", "monthly reference ET in mm/day, e.g. `6:5.1 7:5.0 8:4.6`"},
        {"coverage_floor", "minimum observed-day fraction per feature window"},
        {"window_start", "station completeness window start (YYYY-MM-DD)"},
        {"window_end", "station completeness window end (YYYY-MM-DD)"},
        {"counties", "comma-separated counties (default: every county in the weather file)"},
        {"k", "number of yield clusters"},
        {"restarts", "k-means restarts"},
        {"preset", "model preset name"},
        {"alpha", "neighbourhood fraction overriding the preset"},
        {"alpha_grid", "alpha values scanned by select"},
        {"degree", "local polynomial degree (1 or 2)"},
        {"select_mode", "dropone or powerset"},
        {"select_mandatory", "predictors kept in every subset"},
        {"select_optional", "predictors enumerated by select (default: preset predictors)"},
        {"season", "target season (July production year)"},
        {"type", "valencia or nonvalencia (default: preset type)"},
        {"B", "bootstrap replicates"},
        {"seed", "random seed"},
        {"outlook", "December temperature outlook: AboveNormal, Normal, BelowNormal, EqualChances"},
        {"outlook_sign", "sign of the post-forecast cold-day effect on %Error (+1 or -1)"},
        {"tilt", "explicit outlook tilt overriding the distribution's"},
        {"tau", "exceedance threshold in percent"},
        {"p_high", "scenario A threshold"},
        {"p_low", "scenario B threshold"},
        {"contract_lbs", "pounds per futures contract"},
        {"announcement_day", "October day of the forecast release"},
        {"host", "serve bind address"},
        {"port", "serve port"},
    };
    return keys;
}

bool is_path_key(const std::string& key) {
    return key == "forecast" || key == "temple" || key == "weather" || key == "yields" || key == "prices" ||
           key == "calendar";
}

namespace {

double to_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError(fmt::format("{}: bad number `{}`", key, v));
    return out;
}

long to_int(const std::string& key, const std::string& v) {
    long out = 0;
    const char* b = v.data();
    if (!v.empty() && v[0] == '+') ++b;
    auto [p, ec] = std::from_chars(b, v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError(fmt::format("{}: bad integer `{}`", key, v));
    return out;
}

std::vector<std::string> split_names(const std::string& v) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        auto end = v.find(',', start);
        if (end == std::string::npos) end = v.size();
        auto t = csv::trim(std::string_view(v).substr(start, end - start));
        if (!t.empty()) out.push_back(t);
        start = end + 1;
    }
    return out;
}

std::vector<double> real_tokens(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string cur;
    for (char c : v + ",") {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(to_real(key, cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    return out;
}

void check(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

PipelineConfig PipelineConfig::from_entries(const std::map<std::string, std::string>& entries,
                                            const std::filesystem::path& base_dir) {
    PipelineConfig c;
    const auto& known = config_keys();
    for (const auto& [key, raw] : entries) {
        check(std::any_of(known.begin(), known.end(), [&](const auto& kv) { return kv.first == key; }),
              "unknown config key `" + key + "`");
        const std::string v = csv::trim(raw);
        if (is_path_key(key)) {
            if (v.empty()) continue;
            std::filesystem::path p(v);
            if (p.is_relative()) p = base_dir / p;
            if (key == "forecast") c.forecast = p;
            else if (key == "temple") c.temple = p;
            else if (key == "weather") c.weather = p;
            else if (key == "yields") c.yields = p;
            else if (key == "prices") c.prices = p;
            else c.calendar = p;
        } else if (key == "kc") {
            c.kc = to_real(key, v);
        } else if (key == "et0") {
            std::string cur;
            for (char ch : v + " ") {
                if (ch == ' ' || ch == ',' || ch == '\t') {
                    if (cur.empty()) continue;
                    const auto colon = cur.find(':');
                    check(colon != std::string::npos, "et0 entries look like `month:mm_per_day`");
                    const long m = to_int(key, cur.substr(0, colon));
                    check(m >= 1 && m <= 12, "et0 month out of range");
                    c.et0[static_cast<unsigned>(m)] = to_real(key, cur.substr(colon + 1));
                    cur.clear();
                } else {
                    cur.push_back(ch);
                }
            }
        } else if (key == "coverage_floor") {
            c.coverage_floor = to_real(key, v);
        } else if (key == "window_start" || key == "window_end") {
            auto d = parse_iso_date(v);
            check(d.has_value(), key + ": expected YYYY-MM-DD");
            (key == "window_start" ? c.window_start : c.window_end) = d;
        } else if (key == "counties") {
            c.counties = split_names(v);
        } else if (key == "k") {
            c.k = static_cast<int>(to_int(key, v));
        } else if (key == "restarts") {
            c.restarts = static_cast<int>(to_int(key, v));
        } else if (key == "preset") {
            c.preset = v;
        } else if (key == "alpha") {
            c.alpha = to_real(key, v);
        } else if (key == "alpha_grid") {
            c.alpha_grid = real_tokens(key, v);
        } else if (key == "degree") {
            c.degree = static_cast<int>(to_int(key, v));
        } else if (key == "select_mode") {
            check(v == "dropone" || v == "powerset", "select_mode must be dropone or powerset");
            c.select_mode = v == "dropone" ? locfit::EnumerationMode::DropOne : locfit::EnumerationMode::PowerSet;
        } else if (key == "select_mandatory") {
            c.select_mandatory = split_names(v);
        } else if (key == "select_optional") {
            c.select_optional = split_names(v);
        } else if (key == "season") {
            c.season = static_cast<int>(to_int(key, v));
        } else if (key == "type") {
            auto t = parse_orange_type(v);
            check(t.has_value(), "type must be valencia or nonvalencia");
            c.type = t;
        } else if (key == "B") {
            c.B = static_cast<int>(to_int(key, v));
        } else if (key == "seed") {
            std::uint64_t s = 0;
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
            check(ec == std::errc{} && p == v.data() + v.size(), "seed must be a nonnegative integer");
            c.seed = s;
        } else if (key == "outlook") {
            auto o = forecast::parse_outlook(v);
            check(o.has_value(), "outlook must be AboveNormal, Normal, BelowNormal or EqualChances");
            c.outlook = *o;
        } else if (key == "outlook_sign") {
            const long s = to_int(key, v);
            check(s == 1 || s == -1, "outlook_sign must be +1 or -1");
            c.outlook_sign = static_cast<int>(s);
        } else if (key == "tilt") {
            auto t = forecast::parse_tilt(v);
            check(t.has_value(), "tilt must be RaisesOverestimation, LowersOverestimation, NoTilt or Unknown");
            c.tilt = t;
        } else if (key == "tau") {
            c.tau = to_real(key, v);
        } else if (key == "p_high") {
            c.p_high = to_real(key, v);
        } else if (key == "p_low") {
            c.p_low = to_real(key, v);
        } else if (key == "contract_lbs") {
            c.contract_lbs = static_cast<int>(to_int(key, v));
        } else if (key == "announcement_day") {
            c.announcement_day = static_cast<unsigned>(to_int(key, v));
        } else if (key == "host") {
            c.host = v;
        } else if (key == "port") {
            c.port = static_cast<int>(to_int(key, v));
        }
    }

    check(c.kc > 0.0, "kc must be positive");
    check(c.coverage_floor >= 0.0 && c.coverage_floor <= 1.0, "coverage_floor must lie in [0, 1]");
    check(c.k >= 1, "k must be at least 1");
    check(c.restarts >= 1, "restarts must be at least 1");
    check(!c.alpha || (*c.alpha > 0.0 && *c.alpha <= 1.0), "alpha must lie in (0, 1]");
    check(!c.alpha_grid.empty(), "alpha_grid must not be empty");
    for (double a : c.alpha_grid) check(a > 0.0 && a <= 1.0, "alpha_grid values must lie in (0, 1]");
    check(c.degree == 1 || c.degree == 2, "degree must be 1 or 2");
    check(c.B >= 100, "B must be at least 100");
    check(std::isfinite(c.tau), "tau must be finite");
    check(c.p_low >= 0.0 && c.p_low < c.p_high && c.p_high <= 1.0, "need 0 <= p_low < p_high <= 1");
    check(c.contract_lbs > 0, "contract_lbs must be positive");
    check(c.announcement_day >= 1 && c.announcement_day <= 31, "announcement_day must be an October day");
    check(c.port >= 0 && c.port <= 65535, "port out of range");
    if (c.window_start && c.window_end) check(*c.window_start <= *c.window_end, "window_start after window_end");
    locfit::find_preset(c.preset);
    return c;
}

PipelineConfig PipelineConfig::load(const std::optional<std::filesystem::path>& path,
                                    const std::map<std::string, std::string>& overrides) {
    std::map<std::string, std::string> entries;
    std::filesystem::path base = std::filesystem::current_path();
    if (path) {
        if (!std::filesystem::exists(*path)) throw IoError("config file not found: " + path->string());
        entries = KeyValueFile::load(*path).entries();
        base = std::filesystem::absolute(*path).parent_path();
    }
    for (const auto& [key, value] : overrides) {
        if (is_path_key(key) && !value.empty()) {
            entries[key] = std::filesystem::absolute(value).string();
        } else {
            entries[key] = value;
        }
    }
    return from_entries(entries, base);
}

OrangeType PipelineConfig::resolved_type() const {
    return type ? *type : locfit::find_preset(preset).orange_type;
}

int PipelineConfig::required_season() const {
    if (!season) throw ConfigError("this command needs `season`");
    return *season;
}

}  // namespace orcast::pipeline
