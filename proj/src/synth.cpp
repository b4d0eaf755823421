#include "orcast/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "orcast/csv.hpp"
#include "orcast/dates.hpp"
#include "orcast/features.hpp"
#include "orcast/ingest.hpp"
#include "orcast/rng.hpp"

namespace orcast::synth {

namespace fs = std::filesystem;

namespace {

constexpr int kFirstWeatherYear = 1976;
constexpr int kLastYear = 2019;
constexpr int kFirstSeason = 1978;

// substream indices for the independent parts of the dataset
enum Stream : std::uint64_t {
    kGroupShape = 1,
    kCountyNoise = 2,
    kRegional = 3,
    kLocal = 100,  // + station index
    kGaps = 200,   // + station index
    kErrors = 300,
    kPrices = 400,
};

class Gaussian {
public:
    explicit Gaussian(SplitMix64 rng) : rng_(rng) {}
    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = rng_.uniform();
        while (u1 <= 0.0) u1 = rng_.uniform();
        const double u2 = rng_.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }
    double uniform() { return rng_.uniform(); }

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

double round1(double x) { return std::round(x * 10.0) / 10.0; }

struct StationSpec {
    std::string id;
    std::string county;
    double gap_rate;  // probability that a day loses one field
    double offset_c;  // local temperature offset
};

std::vector<StationSpec> station_specs() {
    std::vector<StationSpec> out;
    int n = 1;
    for (const auto& [county, group] : planted_groups()) {
        // south-coast groups run warmer
        const double offset = group == 3 ? 1.5 : group == 4 ? 1.0 : group == 1 ? 0.3 : -0.5;
        out.push_back({fmt::format("FL{:03}", n++), county, 0.004, offset});
    }
    for (const char* county : {"Collier", "Indian River", "Polk"}) {
        out.push_back({fmt::format("FL{:03}", n++), county, 0.25, 0.0});
    }
    return out;
}

int day_of_year(const Date& d) {
    using namespace std::chrono;
    return static_cast<int>((sys_days{d} - sys_days{year_month_day{d.year(), January, day{1}}}).count());
}

std::vector<DailyWeatherRecord> make_weather(std::uint64_t seed, const std::vector<StationSpec>& specs) {
    const Date first = make_date(kFirstWeatherYear, 1, 1);
    const Date last = make_date(kLastYear, 12, 31);
    // Shared regional anomaly (cold fronts) with a per-winter intensity.
    Gaussian regional(SplitMix64::substream(seed, kRegional));
    std::vector<double> anomaly;
    std::vector<double> wet;  // regional rain driver in [0, 1)
    std::vector<double> amount;
    double a = 0.0;
    double winter_shift = 0.0;
    for (Date d = first; d <= last; d = add_days(d, 1)) {
        if (month_of(d) == 11 && static_cast<unsigned>(d.day()) == 1) winter_shift = 2.0 * regional();
        a = 0.7 * a + 2.2 * regional();
        anomaly.push_back(a + (month_of(d) >= 11 || month_of(d) <= 3 ? winter_shift : 0.0));
        wet.push_back(regional.uniform());
        amount.push_back(-std::log(1.0 - regional.uniform()));
    }

    std::vector<DailyWeatherRecord> out;
    for (std::size_t s = 0; s < specs.size(); ++s) {
        const auto& spec = specs[s];
        Gaussian local(SplitMix64::substream(seed, kLocal + s));
        Gaussian gaps(SplitMix64::substream(seed, kGaps + s));
        std::size_t i = 0;
        for (Date d = first; d <= last; d = add_days(d, 1), ++i) {
            const double phase = 2.0 * std::numbers::pi * (day_of_year(d) - 15) / 365.25;
            const double tmin = 16.0 - 7.5 * std::cos(phase) + spec.offset_c + anomaly[i] + 1.2 * local();
            const double tmax = tmin + 10.0 + 1.5 * std::abs(local());
            const double wet_prob = 0.33 - 0.15 * std::cos(phase);
            double precip = 0.0;
            if (wet[i] < wet_prob && local.uniform() < 0.85) precip = 9.0 * amount[i] * (0.6 + 0.8 * local.uniform());
            DailyWeatherRecord r{spec.id, spec.county, d, round1(tmin), round1(tmax), round1(precip)};
            if (gaps.uniform() < spec.gap_rate) {
                const double which = gaps.uniform();
                if (which < 1.0 / 3.0) r.tmin_c.reset();
                else if (which < 2.0 / 3.0) r.tmax_c.reset();
                else r.precip_mm.reset();
            }
            out.push_back(std::move(r));
        }
    }
    return out;
}

EventCalendar calendar() {
    EventCalendar c;
    c.freeze_years = {1982, 1984, 1986, 1990, 2011};
    c.hurricane_years = {2005, 2006, 2018};
    c.cg_from_year = 2013;
    return c;
}

features::StationSeries series_for(const std::vector<DailyWeatherRecord>& weather, const std::string& id,
                                   const std::string& county) {
    std::vector<DailyWeatherRecord> rows;
    for (const auto& r : weather) {
        if (r.station_id == id) rows.push_back(r);
    }
    return features::StationSeries(id, county, rows);
}

const std::string& primary_station(const std::vector<StationSpec>& specs, const std::string& county) {
    return std::find_if(specs.begin(), specs.end(), [&](const StationSpec& s) { return s.county == county; })->id;
}

std::string yields_csv(std::uint64_t seed) {
    constexpr int years = kLastYear - 1977 + 1;
    Gaussian shape(SplitMix64::substream(seed, kGroupShape));
    std::array<std::array<double, years>, 4> group{};
    for (auto& g : group) {
        for (auto& v : g) v = shape();
    }
    Gaussian noise(SplitMix64::substream(seed, kCountyNoise));
    std::string out = "county,year,yield\n";
    int c = 0;
    for (const auto& [county, g] : planted_groups()) {
        const double level = 280.0 + 15.0 * c;
        for (int t = 0; t < years; ++t) {
            const double v = level + 40.0 * group[static_cast<std::size_t>(g - 1)][static_cast<std::size_t>(t)] +
                             4.0 * noise();
            // a few gaps exercise interpolation
            const bool gap = (c % 5 == 2) && (t == 7 || t == 21);
            out += csv::join({county, std::to_string(1977 + t), gap ? std::string{} : csv::format_real(round1(v))});
            out += "\n";
        }
        ++c;
    }
    return out;
}

std::string prices_csv(std::uint64_t seed, const std::map<int, double>& nv_errors) {
    Gaussian g(SplitMix64::substream(seed, kPrices));
    static constexpr std::array<std::pair<unsigned, char>, 6> kListed{
        {{1, 'F'}, {3, 'H'}, {5, 'K'}, {7, 'N'}, {9, 'U'}, {11, 'X'}}};
    std::string out = "date,contract,close_cents_per_lb\n";
    double log_price = std::log(90.0);
    bool jumped = false;
    for (Date d = make_date(1977, 1, 3); d <= make_date(kLastYear, 12, 31); d = add_days(d, 1)) {
        const auto wd = std::chrono::weekday{std::chrono::sys_days{d}};
        if (wd == std::chrono::Saturday || wd == std::chrono::Sunday) continue;
        const int y = year_of(d);
        const unsigned m = month_of(d);
        if (m == 10 && static_cast<unsigned>(d.day()) >= 10 && !jumped) {
            auto it = nv_errors.find(y + 1);
            if (it != nv_errors.end()) log_price += 0.008 * it->second;
            jumped = true;
        }
        if (m == 1) jumped = false;
        log_price += 0.012 * g();
        log_price = std::clamp(log_price, std::log(40.0), std::log(240.0));
        // nearest listed month expiring after the 10th
        int cy = y;
        unsigned cm = 0;
        char code = 'F';
        for (const auto& [lm, lc] : kListed) {
            if (lm > m || (lm == m && static_cast<unsigned>(d.day()) < 10)) {
                cm = lm;
                code = lc;
                break;
            }
        }
        if (cm == 0) {
            cy = y + 1;
            code = 'F';
        }
        out += fmt::format("{},OJ{}{:02},{}\n", format_iso_date(d), code, cy % 100,
                           csv::format_real(std::round(std::exp(log_price) * 100.0) / 100.0));
    }
    return out;
}

}  // namespace

const std::map<std::string, int>& planted_groups() {
    static const std::map<std::string, int> groups{
        {"Manatee", 1},   {"Hardee", 1},    {"DeSoto", 1},  {"Hillsborough", 1}, {"Polk", 2},
        {"Highlands", 2}, {"Lake", 2},      {"Osceola", 2}, {"Charlotte", 3},    {"Glades", 3},
        {"Collier", 3},   {"Hendry", 3},    {"St. Lucie", 4}, {"Indian River", 4}, {"Martin", 4},
    };
    return groups;
}

void write_dataset(const fs::path& dir, std::uint64_t seed) {
    fs::create_directories(dir);
    const auto specs = station_specs();
    const auto weather = make_weather(seed, specs);
    const auto cal = calendar();

    features::FeatureParams params;
    const auto collier = series_for(weather, primary_station(specs, "Collier"), "Collier");
    const auto indian_river = series_for(weather, primary_station(specs, "Indian River"), "Indian River");

    Gaussian noise(SplitMix64::substream(seed, kErrors));
    std::string forecast = "season_year,orange_type,forecast_kboxes,production_kboxes\n";
    std::string temple = "season_year,forecast_kboxes,production_kboxes\n";
    std::map<int, double> nv_errors;
    for (int season = kFirstSeason; season <= kLastYear; ++season) {
        const auto jan4c = features::compute_feature(collier, "Jan4c", season, features::Phase::PreForecast, params);
        const auto may = features::compute_feature(indian_river, "MayQ75", season, features::Phase::PreForecast, params);
        const double jan = jan4c.present() ? jan4c.value : 6.0;
        const double wet = may.present() ? may.value : 7.0;
        const double nv = 0.9 * (jan - 6.0) + 1.5 + 9.0 * cal.freeze(season) + 6.0 * cal.hurricane(season) +
                          1.2 * noise();
        const double va = 0.8 * (wet - 7.0) - 1.0 + 7.0 * cal.freeze(season) + 5.0 * cal.hurricane(season) -
                          4.0 * cal.greening(season) + 1.2 * noise();
        nv_errors[season] = nv;

        const double nv_p = round1(160000.0 * (1.0 + 0.1 * noise()));
        const double va_p = round1(110000.0 * (1.0 + 0.1 * noise()));
        double nv_f = round1(nv_p * (1.0 + nv / 100.0));
        double nv_raw_p = nv_p;
        if (season <= kLastSeasonWithoutTemples) {
            const double tf = 4000.0, tp = round1(4000.0 / (1.0 + nv / 100.0));
            temple += fmt::format("{},{},{}\n", season, csv::format_real(tf), csv::format_real(tp));
            nv_f = round1(nv_f - tf);
            nv_raw_p = round1(nv_p - tp);
        }
        forecast += fmt::format("{},NON_VALENCIA,{},{}\n", season, csv::format_real(nv_f), csv::format_real(nv_raw_p));
        forecast += fmt::format("{},VALENCIA,{},{}\n", season, csv::format_real(round1(va_p * (1.0 + va / 100.0))),
                                csv::format_real(va_p));
    }

    csv::write_file(dir / "weather.csv", format_weather(weather));
    csv::write_file(dir / "forecast.csv", forecast);
    csv::write_file(dir / "temple.csv", temple);
    csv::write_file(dir / "yields.csv", yields_csv(seed));
    csv::write_file(dir / "prices.csv", prices_csv(seed, nv_errors));
    csv::write_file(dir / "calendar.txt", format_event_calendar(cal));
    csv::write_file(dir / "config.txt", fmt::format(R"(# synthetic dataset, seed {0}
forecast = forecast.csv
temple = temple.csv
weather = weather.csv
yields = yields.csv
prices = prices.csv
calendar = calendar.txt
kc = 0.9
et0 = 6:5.2 7:5.3 8:4.9
k = 4
restarts = 10
preset = nonvalencia_station
season = 2019
B = 1000
seed = {0}
tau = 5
p_high = 0.9
p_low = 0.1
outlook = BelowNormal
outlook_sign = 1
)",
                                                    seed));
}

}  // namespace orcast::synth
