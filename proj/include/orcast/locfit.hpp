#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace orcast::locfit {

/// Column scaling applied before distances are measured. Indicator (0/1) columns keep
/// their raw values; continuous columns are centred and divided by their sample
/// standard deviation (1 when the column is constant).
struct Standardization {
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<bool> indicator;

    static Standardization from_training(const Eigen::MatrixXd& x, const std::optional<std::vector<bool>>& indicator);
    Eigen::VectorXd apply(std::span<const double> row) const;
};

/// Smoother weights producing an estimate at one point: estimate = weights . y.
struct LocalRow {
    Eigen::VectorXd weights;  // length n
    bool fallback = false;    // local weighted mean used instead of the polynomial fit
};

/// Local polynomial regression with a nearest-neighbour bandwidth and tricube weights.
struct LocfitModel {
    std::string id;
    std::vector<std::string> predictors;
    std::vector<int> seasons;  // optional row labels
    Eigen::MatrixXd training_x;  // raw
    Eigen::VectorXd training_y;
    double alpha = 0.7;
    int degree = 1;
    Standardization standardization;
    Eigen::MatrixXd scaled_x;
    Eigen::VectorXd fitted;
    Eigen::VectorXd hat_diag;
    double hat_trace = 0.0;
    std::vector<bool> fallback;  // per training point

    Eigen::Index n() const { return training_x.rows(); }
    Eigen::Index p() const { return training_x.cols(); }
    /// Neighbourhood size ceil(alpha * n), clamped to [1, n].
    Eigen::Index neighbours() const;
    Eigen::VectorXd residuals() const { return training_y - fitted; }
};

/// Smoother row at standardized point `z0`:
///   h = distance to the ceil(alpha*n)-th nearest training point,
///   w_i = (1 - (d_i/h)^3)^3 for d_i < h, else 0.
/// Local design columns are 1, (z - z0) and, for degree 2, the squares and pairwise
/// products of (z - z0). Columns that vanish on every positively weighted point are
/// removed (they cannot move the intercept); if the remaining weighted system is rank
/// deficient the row falls back to the weighted mean. When h = 0 the row averages the
/// zero-distance points uniformly.
LocalRow smoother_row(const Eigen::MatrixXd& scaled_x, const Eigen::VectorXd& z0, double alpha, int degree);

/// Fits at every training point. Throws ValidationError for n < 5, alpha outside (0, 1],
/// degree outside {1, 2}, mismatched sizes, or non-finite cells.
LocfitModel fit_locfit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha, int degree = 1,
                       std::vector<std::string> predictors = {},
                       const std::optional<std::vector<bool>>& indicator = std::nullopt);

struct Prediction {
    double value = 0.0;
    bool fallback = false;
};

/// Estimate at a raw predictor vector (same column order as training).
Prediction predict(const LocfitModel& model, std::span<const double> x0);

struct GcvResult {
    double value = 0.0;
    bool degenerate = false;  // hat trace >= n; value is +infinity
};

/// n * rss / (n - trace)^2, or +infinity when trace >= n (to a relative 1e-9).
GcvResult gcv_score(double n, double rss, double trace);
GcvResult gcv(const LocfitModel& model);

/// Self-contained JSON: predictors, alpha, degree, standardization, training data.
std::string to_json(const LocfitModel& model);
/// Rebuilds a model from `to_json` output by refitting on the stored training data.
LocfitModel from_json(const std::string& text);

}  // namespace orcast::locfit
