#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "orcast/dates.hpp"
#include "orcast/ingest.hpp"
#include "orcast/prob_forecast.hpp"

namespace orcast::decision {

inline constexpr int kContractLbs = 15000;

/// Dollars per futures contract for a move of `cents_per_lb`.
inline double per_contract_dollars(double cents_per_lb, int contract_lbs = kContractLbs) {
    return cents_per_lb * static_cast<double>(contract_lbs) / 100.0;
}

struct SkippedYear {
    int announcement_year = 0;
    std::string reason;
};

struct PayoffEstimates {
    OrangeType orange_type = OrangeType::NonValencia;
    double e_long_cents_per_lb = 0.0;
    double e_short_cents_per_lb = 0.0;
    int contract_lbs = kContractLbs;
    double e_long_per_contract = 0.0;
    double e_short_per_contract = 0.0;
    int n_pos = 0;
    int n_neg = 0;
    int bootstrap_B = 1000;
    std::uint64_t seed = 0;
    bool long_empty = false;   // no positive moves; e_long forced to 0
    bool short_empty = false;  // no negative moves; e_short forced to 0
    std::vector<SkippedYear> skipped;
};

/// Exit month for the harvest end of each type: March (non-Valencia) or May (Valencia).
unsigned exit_month(OrangeType type);

/// Mean over B replicates of the median of a with-replacement resample of `values`.
/// Replicate b draws indices with SplitMix64 substream(seed, stream_base + stream_step*b).
double bootstrap_median_mean(std::vector<double> values, int replicates, std::uint64_t seed,
                             std::uint64_t stream_base, std::uint64_t stream_step);

/// Price move per announcement: mean close over the exit month of the following year
/// minus the first close on or after the announcement date. Zero moves belong to
/// neither side. Positive moves use substreams 2b, negative moves 2b+1.
PayoffEstimates estimate_payoffs(const std::vector<PriceBar>& prices, const std::vector<Date>& forecast_dates,
                                 OrangeType type, int replicates, std::uint64_t seed,
                                 int contract_lbs = kContractLbs);

/// Sum of p * payoff. Throws ValidationError for a negative probability or a total above 1 + 1e-9.
double emv(const std::vector<std::pair<double, double>>& branches);

enum class Scenario { A_Overestimate, B_Underestimate, C_Close };
enum class Position { Long, Short, Neutral };

std::string_view to_string(Scenario s);
std::string_view to_string(Position p);

enum class Role { Farmer, Processor };
/// Farmer and processor action text for a scenario.
std::string_view action_text(Scenario s, Role role);

struct DecisionParams {
    double tau = 5.0;
    double p_high = 0.9;
    double p_low = 0.1;
};

struct Recommendation {
    Scenario scenario = Scenario::C_Close;
    Position position = Position::Neutral;
    double p_exceed = 0.0;
    double tau = 5.0;
    double emv_long = 0.0;
    double emv_short = 0.0;
    forecast::Tilt tilt = forecast::Tilt::Unknown;
    std::string action_farmer;
    std::string action_processor;
    std::string rationale;
    bool degenerate = false;
};

Scenario classify(double p_exceed, double p_high, double p_low);

/// Decision from an exceedance probability. Throws ValidationError unless
/// 0 <= p_low < p_high <= 1 and p_exceed lies in [0, 1].
Recommendation recommend_probability(double p_exceed, const PayoffEstimates& payoffs, const DecisionParams& params,
                                     forecast::Tilt tilt, bool degenerate = false);

/// Decision from a bootstrap distribution (p_exceed = exceedance(dist, tau)).
Recommendation recommend(const forecast::ErrorDistribution& dist, const PayoffEstimates& payoffs,
                         const DecisionParams& params, forecast::Tilt tilt);

/// {scenario, position, p_exceed, tau, emv_long, emv_short, tilt, actions{farmer, processor}, rationale, degenerate}
std::string to_json(const Recommendation& rec);
std::string to_json(const PayoffEstimates& payoffs);
PayoffEstimates payoffs_from_json(const std::string& text);

}  // namespace orcast::decision
