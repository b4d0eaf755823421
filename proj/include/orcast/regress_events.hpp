#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "orcast/features.hpp"
#include "orcast/ingest.hpp"

namespace orcast::events {

/// Least-squares fit of %Error on the freeze / hurricane / greening indicators.
struct EventRegressionFit {
    bool has_intercept = true;
    double intercept = 0.0;
    double freezes = 0.0;     // percent per freeze season
    double hurricanes = 0.0;  // percent per hurricane season
    double greening = 0.0;    // percent per greening season
    std::vector<std::string> dropped;  // columns removed as collinear or constant
    std::map<int, double> observed;
    std::map<int, double> fitted;
    std::map<int, double> residuals;
    double r_squared = 0.0;
};

/// Ordinary least squares on [1?, Freezes, Hurricanes, Cg]. Columns are admitted in that
/// order and a column that does not raise the design rank is dropped with a warning.
/// Throws NumericalError when no column survives or `errors` is empty.
EventRegressionFit fit_event_regression(const std::map<int, double>& errors, const EventCalendar& calendar,
                                        bool include_intercept = true);

std::map<int, double> errors_by_season(const std::vector<SeasonRecord>& records);

std::string format_event_fit(const EventRegressionFit& fit);  // JSON

double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> x);

double spearman(std::span<const double> x, std::span<const double> y);

/// Plug-in mutual information (nats) after equal-frequency discretization of each
/// variable into `bins` bins by average rank: bin = min(bins-1, floor(bins*(rank-1)/n)).
double mutual_information(std::span<const double> x, std::span<const double> y, int bins = 5);

struct CandidateScreen {
    std::string name;
    double pearson_r = features::kNaN;
    double spearman_rho = features::kNaN;
    double mutual_information_nats = features::kNaN;
    int n_effective = 0;
    bool skipped = false;
    std::string reason;
};

enum class Statistic { Pearson, Spearman, MutualInformation };

struct ScreeningReport {
    std::vector<CandidateScreen> candidates;  // candidate-name order

    /// Non-skipped candidates by descending |statistic| (MI is already nonnegative).
    std::vector<std::string> ranking(Statistic statistic) const;
    const CandidateScreen* find(std::string_view name) const;
};

/// Screens every climate column of `candidates` against the residual series using
/// pairwise-complete seasons. Candidates with fewer than `min_overlap` seasons or zero
/// variance are kept in the report, flagged as skipped.
ScreeningReport screen_predictors(const std::map<int, double>& residuals,
                                  const features::PredictorMatrix& candidates, int min_overlap = 8, int bins = 5);

std::string format_screening(const ScreeningReport& report);

/// `season_year,residual,value` pairs for one candidate column.
std::string format_scatter(const std::map<int, double>& residuals, const features::PredictorMatrix& candidates,
                           std::size_t column);

}  // namespace orcast::events
