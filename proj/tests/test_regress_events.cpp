#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "json.hpp"
#include "oracles.hpp"
#include "orcast/errors.hpp"
#include "orcast/regress_events.hpp"
#include "test_util.hpp"

using namespace orcast;
using namespace orcast::events;

namespace {

struct Dataset {
    std::map<int, double> errors;
    EventCalendar calendar;
};

Dataset random_dataset(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    Dataset d;
    const int n = 12 + static_cast<int>(gen() % 30);
    for (int y = 1980; y < 1980 + n; ++y) {
        d.errors[y] = u(gen);
        if (gen() % 5 == 0) d.calendar.freeze_years.insert(y);
        if (gen() % 6 == 0) d.calendar.hurricane_years.insert(y);
    }
    d.calendar.freeze_years.insert(1981);
    d.calendar.hurricane_years.insert(1983);
    d.calendar.cg_from_year = 1980 + n - 3 - static_cast<int>(gen() % 5);
    return d;
}

oracle::Mat design(const Dataset& d, bool intercept) {
    oracle::Mat x;
    for (const auto& [y, _] : d.errors) {
        oracle::Vec row;
        if (intercept) row.push_back(1.0);
        row.push_back(d.calendar.freeze(y));
        row.push_back(d.calendar.hurricane(y));
        row.push_back(d.calendar.greening(y));
        x.push_back(row);
    }
    return x;
}

oracle::Vec values(const std::map<int, double>& m) {
    oracle::Vec v;
    for (const auto& [_, e] : m) v.push_back(e);
    return v;
}

}  // namespace

TEST_CASE("pure freeze effect is recovered exactly") {
    Dataset d;
    for (int y = 1990; y < 2010; ++y) d.errors[y] = 0.0;
    for (int y : {1991, 1995, 2003}) {
        d.calendar.freeze_years.insert(y);
        d.errors[y] = 10.0;
    }
    d.calendar.hurricane_years = {1998, 2004};
    d.calendar.cg_from_year = 2006;
    const auto fit = fit_event_regression(d.errors, d.calendar);
    CHECK(fit.freezes == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::abs(fit.intercept) < 1e-12);
    CHECK(std::abs(fit.hurricanes) < 1e-12);
    CHECK(std::abs(fit.greening) < 1e-12);
    for (const auto& [_, r] : fit.residuals) CHECK(std::abs(r) < 1e-12);
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("no events: intercept is the mean and the others are dropped") {
    std::map<int, double> e{{2000, 1.0}, {2001, 4.0}, {2002, -2.0}, {2003, 9.0}};
    const auto fit = fit_event_regression(e, EventCalendar{});
    CHECK(fit.intercept == doctest::Approx(3.0));
    CHECK(fit.dropped == std::vector<std::string>{"Freezes", "Hurricanes", "Cg"});
    CHECK(fit.freezes == 0.0);
    CHECK(fit.residuals.at(2003) == doctest::Approx(6.0));
    CHECK_THROWS_AS(fit_event_regression(e, EventCalendar{}, false), NumericalError);
    CHECK_THROWS_AS(fit_event_regression({}, EventCalendar{}), NumericalError);
}

TEST_CASE("collinear indicator is dropped in admission order") {
    std::map<int, double> e{{2000, 1.0}, {2001, 4.0}, {2002, -2.0}, {2003, 9.0}, {2004, 3.0}};
    EventCalendar c;
    c.freeze_years = {2001, 2003};
    c.hurricane_years = {2001, 2003};
    const auto fit = fit_event_regression(e, c);
    CHECK(fit.dropped == std::vector<std::string>{"Hurricanes", "Cg"});
    CHECK(fit.freezes == doctest::Approx(6.5 - 2.0 / 3.0));
}

TEST_CASE("coefficients match the normal equations on random data") {
    std::mt19937_64 gen(314);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = random_dataset(gen);
        const bool intercept = trial % 4 != 3;
        const auto x = design(d, intercept);
        const auto ref = oracle::normal_equations(x, values(d.errors));
        REQUIRE(ref);
        const auto fit = fit_event_regression(d.errors, d.calendar, intercept);
        REQUIRE(fit.dropped.empty());
        std::vector<double> got;
        if (intercept) got.push_back(fit.intercept);
        got.insert(got.end(), {fit.freezes, fit.hurricanes, fit.greening});
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - (*ref)[i]) <= 1e-10 * std::max(1.0, std::abs((*ref)[i])));
        // residuals sum to zero with an intercept
        if (intercept) {
            double s = 0;
            for (const auto& [_, r] : fit.residuals) s += r;
            CHECK(std::abs(s) < 1e-9);
        }
        ++compared;
    }
    CHECK(compared == 200);
}

TEST_CASE("shift and scale of the errors move the coefficients accordingly") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 20; ++trial) {
        auto d = random_dataset(gen);
        const auto base = fit_event_regression(d.errors, d.calendar);
        auto shifted = d.errors;
        for (auto& [_, e] : shifted) e = 2.5 * e + 7.0;
        const auto fit = fit_event_regression(shifted, d.calendar);
        CHECK(fit.intercept == doctest::Approx(2.5 * base.intercept + 7.0));
        CHECK(fit.freezes == doctest::Approx(2.5 * base.freezes));
        CHECK(fit.hurricanes == doctest::Approx(2.5 * base.hurricanes));
        CHECK(fit.greening == doctest::Approx(2.5 * base.greening));
        for (const auto& [y, r] : fit.residuals) CHECK(r == doctest::Approx(2.5 * base.residuals.at(y)).scale(1.0));
    }
}

TEST_CASE("event fit JSON lists coefficients and residuals") {
    std::mt19937_64 gen(3);
    const auto d = random_dataset(gen);
    const auto fit = fit_event_regression(d.errors, d.calendar);
    const auto j = nlohmann::json::parse(format_event_fit(fit));
    CHECK(j.at("freezes").get<double>() == fit.freezes);
    CHECK(j.dump().find("residuals") != std::string::npos);
}

TEST_CASE("rank helpers") {
    const std::vector<double> x{3, 1, 4, 1, 5};
    CHECK(average_ranks(x) == std::vector<double>{3, 1.5, 4, 1.5, 5});
    const std::vector<double> y{10, 20, 30, 40, 50};
    CHECK(spearman(y, y) == doctest::Approx(1.0));
}

TEST_CASE("association statistics match the oracles") {
    std::mt19937_64 gen(55);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 8 + gen() % 40;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = trial % 3 == 0 ? std::round(z(gen) * 2) : z(gen);  // ties on some trials
            y[i] = 0.6 * x[i] + z(gen);
        }
        CHECK(std::abs(pearson(x, y) - oracle::pearson(x, y)) < 1e-12);
        CHECK(std::abs(spearman(x, y) - oracle::pearson(oracle::ranks(x), oracle::ranks(y))) < 1e-12);
        CHECK(average_ranks(x) == oracle::ranks(x));
        CHECK(std::abs(mutual_information(x, y) - oracle::mutual_information(x, y, 5)) < 1e-12);
        CHECK(mutual_information(x, y) >= 0.0);

        std::vector<double> neg(n);
        for (std::size_t i = 0; i < n; ++i) neg[i] = -x[i];
        CHECK(pearson(x, x) == doctest::Approx(1.0));
        CHECK(pearson(x, neg) == doctest::Approx(-1.0));
        CHECK(spearman(x, neg) == doctest::Approx(-1.0));
        if (trial % 3 != 0 && n % 5 == 0) CHECK(mutual_information(neg, y) == doctest::Approx(mutual_information(x, y)));
    }
}

namespace {

features::PredictorMatrix candidates(const std::map<int, double>& residuals, std::mt19937_64& gen) {
    features::PredictorMatrix m;
    for (const auto& [y, _] : residuals) m.seasons.push_back(y);
    m.columns = {{"Freezes", features::ColumnKind::Indicator, "", ""},
                 {"A_self", features::ColumnKind::Climate, "A", "self"},
                 {"A_neg", features::ColumnKind::Climate, "A", "neg"},
                 {"A_noise", features::ColumnKind::Climate, "A", "noise"},
                 {"A_flat", features::ColumnKind::Climate, "A", "flat"},
                 {"A_sparse", features::ColumnKind::Climate, "A", "sparse"}};
    const auto n = static_cast<Eigen::Index>(m.rows());
    m.values.resize(n, 6);
    m.quality.assign(m.rows(), std::vector<features::Quality>(6, features::Quality::Ok));
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::Index r = 0;
    for (const auto& [_, e] : residuals) {
        m.values.row(r) << 0.0, e, -e, z(gen), 4.0, r < 5 ? z(gen) : features::kNaN;
        if (r >= 5) m.quality[static_cast<std::size_t>(r)][5] = features::Quality::Missing;
        ++r;
    }
    return m;
}

}  // namespace

TEST_CASE("screening report ranks and flags candidates") {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> z(0.0, 3.0);
    std::map<int, double> res;
    for (int y = 1980; y < 2010; ++y) res[y] = z(gen);
    const auto m = candidates(res, gen);
    const auto rep = screen_predictors(res, m);
    REQUIRE(rep.candidates.size() == 5);
    CHECK(rep.find("A_self")->pearson_r == doctest::Approx(1.0));
    CHECK(rep.find("A_neg")->pearson_r == doctest::Approx(-1.0));
    CHECK(rep.find("A_neg")->spearman_rho == doctest::Approx(-1.0));
    CHECK(rep.find("A_self")->n_effective == 30);
    CHECK(rep.find("A_flat")->skipped);
    CHECK(rep.find("A_sparse")->skipped);
    const auto rank = rep.ranking(Statistic::Pearson);
    REQUIRE(rank.size() == 3);
    CHECK(rank.back() == "A_noise");
    CHECK(rep.find("Freezes") == nullptr);
    const auto text = format_screening(rep);
    CHECK(text.find("A_flat") != std::string::npos);
    const auto scatter = format_scatter(res, m, 3);
    CHECK(std::count(scatter.begin(), scatter.end(), '\n') == 31);
}

TEST_CASE("errors by season") {
    std::vector<SeasonRecord> recs(2);
    recs[0].season_year = 2001;
    recs[0].pct_error = 10.0;
    recs[1].season_year = 2002;
    recs[1].pct_error = -4.0;
    const auto e = errors_by_season(recs);
    CHECK(e.at(2001) == 10.0);
    CHECK(e.at(2002) == -4.0);
}
