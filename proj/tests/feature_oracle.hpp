#pragma once

// Brute-force scans of the daily-weather features, shared by the feature tests and the
// acceptance binary.

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "orcast/features.hpp"

namespace feature_oracle {

using orcast::Date;
using orcast::features::StationSeries;

/// Random station with gaps, whole calendar years.
inline StationSeries random_station(std::mt19937_64& gen, int first_year, int years, double gap = 0.03) {
    std::normal_distribution<double> temp(8.0, 6.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<StationSeries::Day> days;
    const Date start = orcast::make_date(first_year, 1, 1);
    const Date end = orcast::make_date(first_year + years - 1, 12, 31);
    for (Date d = start; d <= end; d = orcast::add_days(d, 1)) {
        StationSeries::Day day;
        const double t = std::round(temp(gen) * 10) / 10;
        day.tmin = t;
        day.tmax = t + std::round(u(gen) * 100) / 10;
        day.precip = u(gen) < 0.6 ? 0.0 : std::round(-std::log(1.0 - u(gen)) * 80) / 10;
        if (u(gen) < gap) day.tmin.reset();
        if (u(gen) < gap) day.tmax.reset();
        if (u(gen) < gap) day.precip.reset();
        days.push_back(day);
    }
    return StationSeries::from_days(start, days);
}

/// Compares the library features of `s` in (year, month) with direct scans. Returns a
/// description of every disagreement; empty when all agree. Counts must match exactly,
/// the deficit sum to 1e-9 relative.
inline std::vector<std::string> mismatches(const StationSeries& s, int first_year, int last_year, int year,
                                           unsigned month, const orcast::features::Et0Table& et0) {
    using namespace orcast;
    using namespace orcast::features;
    std::vector<std::string> out;
    auto note = [&](const std::string& what, double got, double want) {
        out.push_back(what + " got " + std::to_string(got) + " want " + std::to_string(want));
    };
    const Window w = month_window(year, month);
    int obs_t = 0, n1 = 0, n4 = 0, obs_m = 0, run = 0, best = 0;
    for (Date d = w.first; d <= w.last; d = add_days(d, 1)) {
        const auto* day = s.at(d);
        if (day->tmin) {
            ++obs_t;
            n1 += *day->tmin < 1.0;
            n4 += *day->tmin < 4.0;
        }
        if (day->tmin && day->tmax) {
            ++obs_m;
            run = (*day->tmin + *day->tmax) / 2 < 7.0 ? run + 1 : 0;
            best = std::max(best, run);
        } else {
            run = 0;
        }
    }
    const auto c1 = count_days_below(s, w, 1.0), c4 = count_days_below(s, w, 4.0);
    const auto cr = max_cold_run(s, w);
    if (obs_t >= 0.9 * w.days()) {
        if (c1.value != n1) note("1c", c1.value, n1);
        if (c4.value != n4) note("4c", c4.value, n4);
        if (!(c1.value <= c4.value)) note("1c<=4c", c1.value, c4.value);
    } else if (c4.quality != Quality::Missing) {
        note("4c coverage", c4.value, NAN);
    }
    if (obs_m >= 0.9 * w.days()) {
        if (cr.value != best) note("run", cr.value, best);
    } else if (cr.quality != Quality::Missing) {
        note("run coverage", cr.value, NAN);
    }

    for (const auto rw : {RainWindow::FebToApr, RainWindow::May}) {
        const unsigned m0 = rw == RainWindow::May ? 5 : 2, m1 = rw == RainWindow::May ? 5 : 4;
        oracle::Vec pool;
        int years_ok = 0;
        for (int y = first_year; y <= last_year; ++y) {
            int o = 0;
            const Window win = span_window(y, m0, m1);
            for (Date d = win.first; d <= win.last; d = add_days(d, 1))
                if (s.at(d)->precip) ++o, pool.push_back(*s.at(d)->precip);
            years_ok += o >= 0.9 * win.days();
        }
        double q = pool.empty() ? 0.0 : oracle::percentile(pool, 0.75);
        bool none = false;
        if (q == 0.0) {
            oracle::Vec pos;
            for (double v : pool)
                if (v > 0) pos.push_back(v);
            none = pos.empty();
            if (!none) q = oracle::percentile(pos, 0.75);
        }
        const Window win = span_window(year, m0, m1);
        int o = 0, cnt = 0;
        for (Date d = win.first; d <= win.last; d = add_days(d, 1))
            if (s.at(d)->precip) ++o, cnt += *s.at(d)->precip > q;
        const auto fq = rainfall_exceedance_days(s, rw, year);
        if (years_ok >= 5 && o >= 0.9 * win.days() && !none) {
            if (fq.value != cnt) note("q75", fq.value, cnt);
        } else if (fq.quality != Quality::Missing) {
            note("q75 coverage", fq.value, NAN);
        }
    }

    const Window jja = span_window(year, 6, 8);
    double deficit = 0.0;
    int po = 0;
    for (Date d = jja.first; d <= jja.last; d = add_days(d, 1)) {
        const double need = 0.9 * et0.at(month_of(d));
        const auto& r = s.at(d)->precip;
        po += r.has_value();
        deficit += std::max(0.0, need - r.value_or(0.0));
    }
    const auto dv = summer_deficit(s, year, 0.9, et0);
    if (po >= 0.9 * jja.days()) {
        if (std::abs(dv.value - deficit) > 1e-9 * std::max(1.0, deficit)) note("deficit", dv.value, deficit);
    } else if (dv.quality != Quality::Missing) {
        note("deficit coverage", dv.value, NAN);
    }
    return out;
}

}  // namespace feature_oracle
