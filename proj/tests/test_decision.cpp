#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "json.hpp"
#include "oracles.hpp"
#include "orcast/decision.hpp"
#include "orcast/errors.hpp"
#include "test_util.hpp"

using namespace orcast;
using namespace orcast::decision;
using forecast::Tilt;

namespace {

/// Weekday closes from `first` to `last`; price(date) supplies the close.
template <class F>
std::vector<PriceBar> bars(Date first, Date last, F price) {
    std::vector<PriceBar> out;
    for (Date d = first; d <= last; d = add_days(d, 1)) {
        const auto wd = std::chrono::weekday{std::chrono::sys_days{d}}.c_encoding();
        if (wd == 0 || wd == 6) continue;
        out.push_back({d, "OJ", price(d)});
    }
    return out;
}

PayoffEstimates payoffs(double long_dollars, double short_dollars) {
    PayoffEstimates p;
    p.e_long_per_contract = long_dollars;
    p.e_short_per_contract = short_dollars;
    p.e_long_cents_per_lb = long_dollars / 150.0;
    p.e_short_cents_per_lb = short_dollars / 150.0;
    return p;
}

/// Mean of medians with the documented index rule, via the independent stream.
double oracle_median_mean(std::vector<double> v, int B, std::uint64_t seed, std::uint64_t base, std::uint64_t step) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    double total = 0;
    for (int b = 0; b < B; ++b) {
        oracle::Stream st(seed, base + step * static_cast<std::uint64_t>(b));
        std::vector<double> d;
        for (std::size_t i = 0; i < n; ++i) d.push_back(v[std::min(n - 1, static_cast<std::size_t>(st.u() * static_cast<double>(n)))]);
        std::sort(d.begin(), d.end());
        total += n % 2 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
    }
    return total / B;
}

}  // namespace

TEST_CASE("emv examples") {
    CHECK(emv({{1.0, 5.0}}) == 5.0);
    CHECK(emv({{0.5, 10.0}, {0.5, -10.0}}) == 0.0);
    CHECK(std::abs(emv({{0.93, 3060.4}, {0.07, -1963.0}}) - 2708.762) < 1e-6);
    CHECK_THROWS_AS(emv({{0.7, 1.0}, {0.4, 1.0}}), ValidationError);
    CHECK_THROWS_AS(emv({{-0.1, 1.0}}), ValidationError);
}

TEST_CASE("unit conversion") {
    CHECK(per_contract_dollars(20.4) == doctest::Approx(3060.0).epsilon(1e-12));
    CHECK(per_contract_dollars(1.0) == 150.0);
    CHECK(per_contract_dollars(2.0, 30000) == 600.0);
    CHECK(std::abs(per_contract_dollars(20.40267) - 3060.4) <= 0.5);
}

TEST_CASE("constant prices give zero payoffs") {
    const auto p = bars(make_date(2000, 1, 1), make_date(2006, 6, 30), [](Date) { return 120.0; });
    std::vector<Date> dates;
    for (int y = 2000; y < 2006; ++y) dates.push_back(make_date(y, 10, 10));
    const auto e = estimate_payoffs(p, dates, OrangeType::NonValencia, 500, 1);
    CHECK(e.e_long_cents_per_lb == 0.0);
    CHECK(e.e_short_cents_per_lb == 0.0);
    CHECK(e.long_empty);
    CHECK(e.short_empty);
    CHECK(e.n_pos == 0);
}

TEST_CASE("two positive moves: bootstrap median mean tends to 3") {
    // exact enumeration: medians 2, 3, 3, 4 equally likely -> mean 3, sd sqrt(0.5)
    const int B = 20000;
    const double e = bootstrap_median_mean({2.0, 4.0}, B, 9, 0, 2);
    CHECK(std::abs(e - 3.0) <= 4.0 * std::sqrt(0.5 / B));
    CHECK(e == oracle_median_mean({2.0, 4.0}, B, 9, 0, 2));

    // through the price path: entry 100 each October, March mean 102 / 104
    std::vector<PriceBar> p = bars(make_date(2001, 1, 1), make_date(2003, 12, 31), [](Date d) {
        if (month_of(d) == 3 && year_of(d) == 2002) return 102.0;
        if (month_of(d) == 3 && year_of(d) == 2003) return 104.0;
        return 100.0;
    });
    const auto pe = estimate_payoffs(p, {make_date(2001, 10, 10), make_date(2002, 10, 10)}, OrangeType::NonValencia, B, 9);
    CHECK(pe.n_pos == 2);
    CHECK(pe.n_neg == 0);
    CHECK(pe.short_empty);
    CHECK(pe.e_long_cents_per_lb == e);
    CHECK(pe.e_long_per_contract == doctest::Approx(e * 150.0).epsilon(1e-12));
}

TEST_CASE("payoffs match the oracle and ignore input order") {
    std::mt19937_64 g(5);
    std::normal_distribution<double> z(0.0, 1.0);
    double level = 100.0;
    auto p = bars(make_date(1990, 1, 1), make_date(2010, 12, 31), [&](Date) { return level += z(g); });
    std::vector<Date> dates;
    for (int y = 1990; y < 2010; ++y) dates.push_back(make_date(y, 10, 10));
    const auto a = estimate_payoffs(p, dates, OrangeType::Valencia, 400, 21);

    // oracle: recompute moves directly
    std::vector<double> pos, neg;
    for (const auto& d : dates) {
        const int y = year_of(d);
        double entry = 0;
        for (const auto& b : p)
            if (b.date >= d) {
                entry = b.close_cents_per_lb;
                break;
            }
        double s = 0;
        int n = 0;
        for (const auto& b : p)
            if (year_of(b.date) == y + 1 && month_of(b.date) == 5) s += b.close_cents_per_lb, ++n;
        const double diff = s / n - entry;
        (diff > 0 ? pos : neg).push_back(diff);
    }
    CHECK(a.n_pos == static_cast<int>(pos.size()));
    CHECK(a.n_neg == static_cast<int>(neg.size()));
    CHECK(a.e_long_cents_per_lb == doctest::Approx(std::abs(oracle_median_mean(pos, 400, 21, 0, 2))).epsilon(1e-12));
    CHECK(a.e_short_cents_per_lb == doctest::Approx(std::abs(oracle_median_mean(neg, 400, 21, 1, 2))).epsilon(1e-12));
    CHECK(a.e_long_cents_per_lb >= 0.0);
    CHECK(a.e_short_cents_per_lb >= 0.0);

    std::shuffle(p.begin(), p.end(), g);
    std::shuffle(dates.begin(), dates.end(), g);
    const auto b = estimate_payoffs(p, dates, OrangeType::Valencia, 400, 21);
    CHECK(b.e_long_cents_per_lb == a.e_long_cents_per_lb);
    CHECK(b.e_short_cents_per_lb == a.e_short_cents_per_lb);
    CHECK(to_json(b) == to_json(a));
}

TEST_CASE("years without exit data are skipped") {
    const auto p = bars(make_date(2000, 1, 1), make_date(2001, 2, 28), [](Date) { return 100.0; });
    const auto e = estimate_payoffs(p, {make_date(2000, 10, 10)}, OrangeType::NonValencia, 100, 1);
    REQUIRE(e.skipped.size() == 1);
    CHECK(e.skipped[0].announcement_year == 2000);
    CHECK(exit_month(OrangeType::NonValencia) == 3);
    CHECK(exit_month(OrangeType::Valencia) == 5);
}

TEST_CASE("reference decisions at 0.93, 0.003 and a tie") {
    const auto pay = payoffs(3060.0, 1962.0);
    const auto a = recommend_probability(0.93, pay, {}, Tilt::NoTilt);
    CHECK(a.scenario == Scenario::A_Overestimate);
    CHECK(a.position == Position::Long);
    CHECK(a.emv_long == doctest::Approx(0.93 * 3060 - 0.07 * 1962));
    CHECK(a.emv_short == -a.emv_long);
    const auto b = recommend_probability(0.003, payoffs(3948.0, 2811.0), {}, Tilt::NoTilt);
    CHECK(b.scenario == Scenario::B_Underestimate);
    CHECK(b.position == Position::Short);
    const auto c = recommend_probability(0.5, payoffs(1000.0, 1000.0), {}, Tilt::NoTilt);
    CHECK(c.scenario == Scenario::C_Close);
    CHECK(c.position == Position::Neutral);
}

TEST_CASE("scenario thresholds are inclusive and validated") {
    CHECK(classify(0.9, 0.9, 0.1) == Scenario::A_Overestimate);
    CHECK(classify(0.1, 0.9, 0.1) == Scenario::B_Underestimate);
    CHECK(classify(0.5, 0.9, 0.1) == Scenario::C_Close);
    const auto pay = payoffs(1, 1);
    CHECK_THROWS_AS(recommend_probability(0.5, pay, {5, 0.1, 0.1}, Tilt::NoTilt), ValidationError);
    CHECK_THROWS_AS(recommend_probability(0.5, pay, {5, 1.2, 0.1}, Tilt::NoTilt), ValidationError);
    CHECK_THROWS_AS(recommend_probability(1.5, pay, {}, Tilt::NoTilt), ValidationError);
}

TEST_CASE("raising p never moves the scenario toward B; scaling payoffs keeps the position") {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto rank = [](Scenario s) { return s == Scenario::A_Overestimate ? 2 : s == Scenario::C_Close ? 1 : 0; };
    for (int trial = 0; trial < 200; ++trial) {
        const double lo = 0.4 * u(g), hi = 0.6 + 0.4 * u(g);
        const DecisionParams params{5.0, hi, lo};
        const auto pay = payoffs(100 + 3000 * u(g), 100 + 3000 * u(g));
        int prev = -1;
        for (double p = 0; p <= 1.0; p += 0.01) {
            const auto r = recommend_probability(p, pay, params, Tilt::NoTilt);
            CHECK(rank(r.scenario) >= prev);
            prev = rank(r.scenario);
            const double c = 0.01 + 10 * u(g);
            const auto s = recommend_probability(p, payoffs(pay.e_long_per_contract * c, pay.e_short_per_contract * c), params,
                                                 Tilt::NoTilt);
            CHECK(s.position == r.position);
            CHECK(s.scenario == r.scenario);
        }
    }
}

TEST_CASE("action texts follow the scenario") {
    const auto pay = payoffs(1, 1);
    for (double p : {0.95, 0.5, 0.02}) {
        const auto r = recommend_probability(p, pay, {}, Tilt::NoTilt);
        CHECK(r.action_farmer == action_text(r.scenario, Role::Farmer));
        CHECK(r.action_processor == action_text(r.scenario, Role::Processor));
    }
    CHECK(action_text(Scenario::A_Overestimate, Role::Processor).find("taking long position") != std::string_view::npos);
    CHECK(action_text(Scenario::B_Underestimate, Role::Farmer).find("short position") != std::string_view::npos);
    CHECK(action_text(Scenario::C_Close, Role::Processor).find("Safe scenario") == 0);
}

TEST_CASE("raising tilt adds an advisory only in the close scenario") {
    const auto pay = payoffs(1000, 900);
    const auto plain = recommend_probability(0.5, pay, {}, Tilt::NoTilt);
    const auto tilted = recommend_probability(0.5, pay, {}, Tilt::RaisesOverestimation);
    CHECK(tilted.scenario == plain.scenario);
    CHECK(tilted.position == plain.position);
    CHECK(tilted.rationale.find("Advisory") != std::string::npos);
    CHECK(plain.rationale.find("Advisory") == std::string::npos);
    CHECK(recommend_probability(0.95, pay, {}, Tilt::RaisesOverestimation).rationale.find("Advisory") == std::string::npos);
}

TEST_CASE("degenerate distributions still yield a flagged recommendation") {
    forecast::ErrorDistribution d;
    d.samples.assign(200, 8.0);
    d.replicates = 200;
    d.degenerate = true;
    const auto r = recommend(d, payoffs(10, 10), {}, Tilt::Unknown);
    CHECK(r.p_exceed == 1.0);
    CHECK(r.degenerate);
    CHECK(r.scenario == Scenario::A_Overestimate);
}

TEST_CASE("recommendation and payoff JSON") {
    const auto r = recommend_probability(0.93, payoffs(3060, 1962), {}, Tilt::RaisesOverestimation);
    const auto j = nlohmann::json::parse(to_json(r));
    for (const char* k : {"scenario", "position", "p_exceed", "tau", "emv_long", "emv_short", "tilt", "actions", "rationale"})
        CHECK(j.contains(k));
    CHECK(j["scenario"] == "A_Overestimate");
    CHECK(j["position"] == "Long");
    CHECK(j["actions"]["farmer"] == r.action_farmer);

    PayoffEstimates p;
    p.e_long_cents_per_lb = 20.4;
    p.e_short_cents_per_lb = 13.08;
    p.e_long_per_contract = per_contract_dollars(20.4);
    p.e_short_per_contract = per_contract_dollars(13.08);
    p.n_pos = 20;
    p.n_neg = 17;
    p.skipped.push_back({1999, "gap"});
    const auto back = payoffs_from_json(to_json(p));
    CHECK(back.e_long_cents_per_lb == 20.4);
    CHECK(back.e_short_per_contract == doctest::Approx(1962.0));
    CHECK(back.n_neg == 17);
    CHECK(back.skipped.size() == 1);
    CHECK(to_json(back) == to_json(p));
}
