#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orcast/features.hpp"
#include "orcast/ingest.hpp"
#include "orcast/locfit.hpp"

namespace orcast::locfit {

/// Training design assembled from a predictor matrix: seasons present in both the
/// matrix and `y` with every requested column observed.
struct Design {
    std::vector<int> seasons;
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<bool> indicator;
};

Design make_design(const features::PredictorMatrix& matrix, const std::map<int, double>& y,
                   const std::vector<std::string>& predictors);

/// {0.50, 0.55, ..., 0.95, 1.00}
std::vector<double> default_alpha_grid();

enum class EnumerationMode {
    DropOne,  // full set plus every drop-one subset
    PowerSet,      // mandatory plus each non-empty subset of the optional candidates
};

struct EnumerationOptions {
    EnumerationMode mode = EnumerationMode::DropOne;
    std::vector<double> alpha_grid = default_alpha_grid();
    std::optional<double> fixed_alpha;  // overrides the grid
    int degree = 1;
};

struct GcvRow {
    std::vector<bool> included;  // parallel to GcvTable::variables
    std::vector<std::string> predictors;
    double alpha = 0.0;
    double gcv = 0.0;
    bool degenerate = false;
    int n = 0;
};

struct GcvTable {
    std::vector<std::string> variables;
    std::vector<GcvRow> rows;
    std::size_t best_row = 0;
    std::vector<std::string> skipped;  // "<subset>: <reason>"
};

/// Scores predictor subsets by GCV minimised over the alpha grid (ties prefer the
/// larger alpha). The best row has the smallest GCV, then fewer predictors, then the
/// larger alpha, then the earlier row. Throws ValidationError for more than 8
/// optional candidates or when no subset can be scored.
GcvTable enumerate_models(const features::PredictorMatrix& matrix, const std::map<int, double>& y,
                          const std::vector<std::string>& mandatory, const std::vector<std::string>& optional,
                          const EnumerationOptions& options = {});

/// One indicator column per variable plus `alpha,gcv,best`.
std::string format_gcv_table(const GcvTable& table);

enum class PredictorScope { Station, Cluster };

struct ModelPreset {
    std::string name;
    OrangeType orange_type = OrangeType::NonValencia;
    PredictorScope scope = PredictorScope::Cluster;
    features::Phase phase = features::Phase::PreForecast;
    std::vector<std::string> predictors;
    double alpha = 0.65;
};

std::vector<ModelPreset> preset_models();

/// Throws ConfigError for an unknown name.
ModelPreset find_preset(const std::string& name);

}  // namespace orcast::locfit
