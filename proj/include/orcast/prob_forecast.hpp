#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orcast/ingest.hpp"
#include "orcast/locfit.hpp"

namespace orcast::forecast {

enum class Tilt { RaisesOverestimation, LowersOverestimation, NoTilt, Unknown };
enum class Outlook { AboveNormal, Normal, BelowNormal, EqualChances };

std::string_view to_string(Tilt tilt);
std::string_view to_string(Outlook outlook);
std::optional<Tilt> parse_tilt(std::string_view text);
std::optional<Outlook> parse_outlook(std::string_view text);

/// Bootstrap sample of predicted %Error at one predictor vector.
struct ErrorDistribution {
    std::vector<double> samples;  // ascending
    double point_estimate = 0.0;
    int replicates = 0;
    std::uint64_t seed = 0;
    std::string source_model;
    bool degenerate = false;  // every resampled residual is zero
    std::optional<int> season_year;
    std::optional<OrangeType> orange_type;
    Tilt tilt = Tilt::Unknown;
};

/// Neighbourhood residual bootstrap. The ceil(alpha*n) training points nearest to x0
/// (standardized space, ties by index) are sorted by (distance, index); each carries
/// its tricube weight at x0 (uniform over zero-distance points when the bandwidth is
/// zero, uniform over the neighbourhood when every weight vanishes). Replicate b draws
/// u from SplitMix64 substream(seed, b) and takes the first neighbour whose cumulative
/// weight exceeds u * total; the sample is mu(x0) + (y_j - fitted_j).
/// Throws ValidationError for fewer than 100 replicates.
ErrorDistribution bootstrap_distribution(const locfit::LocfitModel& model, std::span<const double> x0,
                                         int replicates, std::uint64_t seed);

/// Fraction of samples strictly greater than tau.
double exceedance(const ErrorDistribution& dist, double tau);

/// Empirical CDF steps: each distinct sample value with the fraction of samples <= it.
std::vector<std::pair<double, double>> cdf_points(const ErrorDistribution& dist);

/// Sign of the post-forecast cold-day predictor's effect on %Error (+1 or -1)
/// combined with a December temperature outlook.
Tilt outlook_tilt(int model_sign, Outlook outlook);

/// {model_id, season_year, orange_type, point_estimate, B, seed, samples[], tilt}
std::string to_json(const ErrorDistribution& dist);
ErrorDistribution distribution_from_json(const std::string& text);

}  // namespace orcast::forecast
