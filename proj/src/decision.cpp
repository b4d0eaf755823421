#include "orcast/decision.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include "json.hpp"
#include <spdlog/spdlog.h>

#include "orcast/errors.hpp"
#include "orcast/rng.hpp"

namespace orcast::decision {

unsigned exit_month(OrangeType type) { return type == OrangeType::Valencia ? 5u : 3u; }

namespace {

double median_sorted(const std::vector<double>& v) {
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double bootstrap_median_mean(std::vector<double> values, int replicates, std::uint64_t seed,
                             std::uint64_t stream_base, std::uint64_t stream_step) {
    if (values.empty() || replicates <= 0) return 0.0;
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    std::vector<double> draw(n);
    double total = 0.0;
    for (int b = 0; b < replicates; ++b) {
        auto rng = SplitMix64::substream(seed, stream_base + stream_step * static_cast<std::uint64_t>(b));
        for (auto& d : draw) d = values[rng.below(n)];
        std::sort(draw.begin(), draw.end());
        total += median_sorted(draw);
    }
    return total / replicates;
}

PayoffEstimates estimate_payoffs(const std::vector<PriceBar>& prices, const std::vector<Date>& forecast_dates,
                                 OrangeType type, int replicates, std::uint64_t seed, int contract_lbs) {
    if (replicates < 1) throw ValidationError("payoff bootstrap needs at least one replicate");
    if (contract_lbs <= 0) throw ValidationError("contract_lbs must be positive");
    std::vector<PriceBar> bars = prices;
    std::sort(bars.begin(), bars.end(), [](const PriceBar& a, const PriceBar& b) { return a.date < b.date; });
    std::vector<Date> dates = forecast_dates;
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());

    PayoffEstimates out;
    out.orange_type = type;
    out.contract_lbs = contract_lbs;
    out.bootstrap_B = replicates;
    out.seed = seed;

    std::vector<double> gains, losses;
    const unsigned month = exit_month(type);
    for (const auto& date : dates) {
        const int year = year_of(date);
        auto entry = std::lower_bound(bars.begin(), bars.end(), date,
                                      [](const PriceBar& b, const Date& d) { return b.date < d; });
        if (entry == bars.end()) {
            out.skipped.push_back({year, "no price on or after the announcement date"});
            continue;
        }
        const Date first = make_date(year + 1, month, 1);
        const Date last = make_date(year + 1, month, static_cast<unsigned>(days_in_month(year + 1, month)));
        double sum = 0.0;
        int count = 0;
        for (auto it = std::lower_bound(bars.begin(), bars.end(), first,
                                        [](const PriceBar& b, const Date& d) { return b.date < d; });
             it != bars.end() && it->date <= last; ++it) {
            sum += it->close_cents_per_lb;
            ++count;
        }
        if (count == 0 || entry->date > last) {
            out.skipped.push_back({year, fmt::format("no closes in exit month {}-{:02}", year + 1, month)});
            continue;
        }
        const double diff = sum / count - entry->close_cents_per_lb;
        if (diff > 0.0) gains.push_back(diff);
        else if (diff < 0.0) losses.push_back(diff);
    }
    for (const auto& s : out.skipped) spdlog::warn("payoffs: skipped {}: {}", s.announcement_year, s.reason);

    out.n_pos = static_cast<int>(gains.size());
    out.n_neg = static_cast<int>(losses.size());
    out.long_empty = gains.empty();
    out.short_empty = losses.empty();
    out.e_long_cents_per_lb = std::abs(bootstrap_median_mean(gains, replicates, seed, 0, 2));
    out.e_short_cents_per_lb = std::abs(bootstrap_median_mean(losses, replicates, seed, 1, 2));
    out.e_long_per_contract = per_contract_dollars(out.e_long_cents_per_lb, contract_lbs);
    out.e_short_per_contract = per_contract_dollars(out.e_short_cents_per_lb, contract_lbs);
    return out;
}

double emv(const std::vector<std::pair<double, double>>& branches) {
    double total_p = 0.0, value = 0.0;
    for (const auto& [p, payoff] : branches) {
        if (!(p >= 0.0)) throw ValidationError("branch probability must be nonnegative");
        total_p += p;
        value += p * payoff;
    }
    if (total_p > 1.0 + 1e-9) throw ValidationError(fmt::format("branch probabilities sum to {} > 1", total_p));
    return value;
}

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::A_Overestimate: return "A_Overestimate";
        case Scenario::B_Underestimate: return "B_Underestimate";
        case Scenario::C_Close: return "C_Close";
    }
    return "C_Close";
}

std::string_view to_string(Position p) {
    switch (p) {
        case Position::Long: return "Long";
        case Position::Short: return "Short";
        case Position::Neutral: return "Neutral";
    }
    return "Neutral";
}

std::string_view action_text(Scenario s, Role role) {
    const bool farmer = role == Role::Farmer;
    switch (s) {
        case Scenario::A_Overestimate:
            return farmer ? "Take a long position in put option or wait to sell at the spot market. Sell put options. "
                            "There could be a loss of premium for put option buyers but they can sell at market price"
                          : "Need to secure supply by placing more futures contracts (taking long position) or buying "
                            "call options before the price increases.";
        case Scenario::B_Underestimate:
            return farmer ? "Buy put options to secure the crop price. Take short position in futures contract"
                          : "Buy enough contracts to secure a minimum production threshold but leave some of the supply "
                            "to the spot market. Sell call options (loss of premium for call option buyer). Take short "
                            "position in futures contracts.";
        case Scenario::C_Close:
            return farmer ? "Buy put options to secure the crop price. Take short position in futures contract or wait "
                            "to sell at market price."
                          : "Safe scenario for procurement, buy “safety supply” as contracts and the rest in the "
                            "spot market";
    }
    return "";
}

Scenario classify(double p_exceed, double p_high, double p_low) {
    if (p_exceed >= p_high) return Scenario::A_Overestimate;
    if (p_exceed <= p_low) return Scenario::B_Underestimate;
    return Scenario::C_Close;
}

Recommendation recommend_probability(double p_exceed, const PayoffEstimates& payoffs, const DecisionParams& params,
                                     forecast::Tilt tilt, bool degenerate) {
    if (!(params.p_low >= 0.0 && params.p_low < params.p_high && params.p_high <= 1.0)) {
        throw ValidationError(fmt::format("need 0 <= p_low < p_high <= 1 (got p_low={}, p_high={})", params.p_low,
                                          params.p_high));
    }
    if (!(p_exceed >= 0.0 && p_exceed <= 1.0)) throw ValidationError("p_exceed must lie in [0, 1]");
    if (!std::isfinite(params.tau)) throw ValidationError("tau must be finite");

    Recommendation rec;
    rec.p_exceed = p_exceed;
    rec.tau = params.tau;
    rec.tilt = tilt;
    rec.degenerate = degenerate;
    rec.scenario = classify(p_exceed, params.p_high, params.p_low);
    rec.emv_long = emv({{p_exceed, payoffs.e_long_per_contract}, {1.0 - p_exceed, -payoffs.e_short_per_contract}});
    rec.emv_short = -rec.emv_long;
    if (rec.emv_long > 0.0) rec.position = Position::Long;
    else if (rec.emv_short > 0.0) rec.position = Position::Short;
    else rec.position = Position::Neutral;
    rec.action_farmer = std::string(action_text(rec.scenario, Role::Farmer));
    rec.action_processor = std::string(action_text(rec.scenario, Role::Processor));

    std::string why;
    switch (rec.scenario) {
        case Scenario::A_Overestimate:
            why = fmt::format("P(%Error > {}) = {:.3f} >= p_high {}: overestimation of production is likely.",
                              params.tau, p_exceed, params.p_high);
            break;
        case Scenario::B_Underestimate:
            why = fmt::format("P(%Error > {}) = {:.3f} <= p_low {}: overestimation is unlikely.", params.tau,
                              p_exceed, params.p_low);
            break;
        case Scenario::C_Close:
            why = fmt::format("P(%Error > {}) = {:.3f} lies between p_low {} and p_high {}.", params.tau, p_exceed,
                              params.p_low, params.p_high);
            break;
    }
    why += fmt::format(" EMV long {:.2f}, short {:.2f} dollars per contract.", rec.emv_long, rec.emv_short);
    if (rec.scenario == Scenario::C_Close && tilt == forecast::Tilt::RaisesOverestimation) {
        why += " Advisory: the December outlook raises the chance of overestimation; scenario A actions deserve "
               "consideration.";
    }
    if (degenerate) why += " Distribution is a point mass.";
    rec.rationale = std::move(why);
    return rec;
}

Recommendation recommend(const forecast::ErrorDistribution& dist, const PayoffEstimates& payoffs,
                         const DecisionParams& params, forecast::Tilt tilt) {
    return recommend_probability(forecast::exceedance(dist, params.tau), payoffs, params, tilt, dist.degenerate);
}

std::string to_json(const Recommendation& rec) {
    nlohmann::ordered_json j;
    j["scenario"] = std::string(to_string(rec.scenario));
    j["position"] = std::string(to_string(rec.position));
    j["p_exceed"] = rec.p_exceed;
    j["tau"] = rec.tau;
    j["emv_long"] = rec.emv_long;
    j["emv_short"] = rec.emv_short;
    j["tilt"] = std::string(forecast::to_string(rec.tilt));
    j["actions"] = {{"farmer", rec.action_farmer}, {"processor", rec.action_processor}};
    j["rationale"] = rec.rationale;
    j["degenerate"] = rec.degenerate;
    return j.dump(2) + "\n";
}

std::string to_json(const PayoffEstimates& p) {
    nlohmann::ordered_json j;
    j["orange_type"] = std::string(to_string(p.orange_type));
    j["e_long_cents_per_lb"] = p.e_long_cents_per_lb;
    j["e_short_cents_per_lb"] = p.e_short_cents_per_lb;
    j["contract_lbs"] = p.contract_lbs;
    j["e_long_per_contract"] = p.e_long_per_contract;
    j["e_short_per_contract"] = p.e_short_per_contract;
    j["n_pos"] = p.n_pos;
    j["n_neg"] = p.n_neg;
    j["bootstrap_B"] = p.bootstrap_B;
    j["seed"] = p.seed;
    j["long_empty"] = p.long_empty;
    j["short_empty"] = p.short_empty;
    auto skipped = nlohmann::ordered_json::array();
    for (const auto& s : p.skipped) skipped.push_back({{"year", s.announcement_year}, {"reason", s.reason}});
    j["skipped"] = skipped;
    return j.dump(2) + "\n";
}

PayoffEstimates payoffs_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        PayoffEstimates p;
        auto type = parse_orange_type(j.at("orange_type").get<std::string>());
        if (!type) throw ValidationError("payoffs JSON: unknown orange_type");
        p.orange_type = *type;
        p.e_long_cents_per_lb = j.at("e_long_cents_per_lb").get<double>();
        p.e_short_cents_per_lb = j.at("e_short_cents_per_lb").get<double>();
        p.contract_lbs = j.value("contract_lbs", kContractLbs);
        if (p.e_long_cents_per_lb < 0.0 || p.e_short_cents_per_lb < 0.0 || p.contract_lbs <= 0) {
            throw ValidationError("payoffs JSON: expectations must be nonnegative and contract_lbs positive");
        }
        p.e_long_per_contract = per_contract_dollars(p.e_long_cents_per_lb, p.contract_lbs);
        p.e_short_per_contract = per_contract_dollars(p.e_short_cents_per_lb, p.contract_lbs);
        p.n_pos = j.value("n_pos", 0);
        p.n_neg = j.value("n_neg", 0);
        p.bootstrap_B = j.value("bootstrap_B", 1000);
        p.seed = j.value("seed", std::uint64_t{0});
        p.long_empty = j.value("long_empty", false);
        p.short_empty = j.value("short_empty", false);
        if (j.contains("skipped")) {
            for (const auto& s : j["skipped"]) p.skipped.push_back({s.at("year").get<int>(), s.at("reason").get<std::string>()});
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("payoffs JSON", 0, e.what());
    }
}

}  // namespace orcast::decision
