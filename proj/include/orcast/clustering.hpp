#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orcast/features.hpp"

namespace orcast::clustering {

/// County yield series aligned on a common year index.
struct CountyYields {
    std::vector<int> years;
    std::map<std::string, std::vector<double>> series;
};

/// Aligns raw (county -> year -> yield) observations on the union of years. Interior
/// gaps are filled by linear interpolation in year; leading/trailing gaps copy the
/// nearest observed value. A county with no observations is a ValidationError.
CountyYields align_yields(const std::map<std::string, std::map<int, double>>& raw);

/// Reads `county,year,yield` (empty yield = missing) and aligns it.
CountyYields load_county_yields(const std::filesystem::path& path);

struct ClusterAssignment {
    int k = 0;
    std::map<std::string, int> assignment;  // county -> 1..k
    std::vector<std::vector<double>> centroids;  // in standardized-yield space, index = id - 1
    double inertia = 0.0;
    std::vector<double> inertia_trace;  // after every Lloyd update of the winning restart
    std::vector<std::string> unscaled;  // constant series left unscaled
    int iterations = 0;
    int best_restart = 0;
};

/// "C1".."Ck".
std::string cluster_id(int id);

/// K-means on per-county z-scored series. Each restart seeds its first centroid from
/// SplitMix64 substream(seed, restart) and adds the rest farthest-point style; Lloyd
/// iterations run until the largest centroid shift is below 1e-9 or 300 iterations.
/// The lowest-inertia restart wins (earliest restart on ties). Cluster ids are
/// numbered by first appearance in county-name order.
ClusterAssignment cluster_counties(const std::map<std::string, std::vector<double>>& yields, int k,
                                   std::uint64_t seed, int restarts);

std::string format_assignment(const ClusterAssignment& assignment);

/// Reads `county,cluster_id` (ids `C<n>`); only `k` and `assignment` are populated.
ClusterAssignment load_assignment(const std::filesystem::path& path);

/// Averages station-scope climate columns into cluster-scope columns `C<n>_<feature>`.
/// Missing station values are left out of the mean; a cluster value is Missing only
/// when every member is missing and Imputed when any member was missing or imputed.
/// Indicator columns pass through. A column whose county is not in the assignment
/// raises ValidationError.
features::PredictorMatrix aggregate_cluster_features(const features::PredictorMatrix& stations,
                                                     const ClusterAssignment& assignment);

}  // namespace orcast::clustering
