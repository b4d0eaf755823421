#include "orcast/locfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "orcast/errors.hpp"

namespace orcast::locfit {

Standardization Standardization::from_training(const Eigen::MatrixXd& x,
                                               const std::optional<std::vector<bool>>& indicator) {
    Standardization s;
    const auto n = x.rows();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        bool is_indicator = false;
        if (indicator) {
            is_indicator = (*indicator)[static_cast<std::size_t>(j)];
        } else {
            is_indicator = (x.col(j).array() == 0.0 || x.col(j).array() == 1.0).all();
        }
        s.indicator.push_back(is_indicator);
        if (is_indicator) {
            s.mean.push_back(0.0);
            s.scale.push_back(1.0);
            continue;
        }
        const double mean = x.col(j).mean();
        double var = 0.0;
        if (n > 1) var = (x.col(j).array() - mean).square().sum() / static_cast<double>(n - 1);
        s.mean.push_back(mean);
        s.scale.push_back(var > 0.0 ? std::sqrt(var) : 1.0);
    }
    return s;
}

Eigen::VectorXd Standardization::apply(std::span<const double> row) const {
    Eigen::VectorXd z(static_cast<Eigen::Index>(row.size()));
    for (std::size_t j = 0; j < row.size(); ++j) {
        z(static_cast<Eigen::Index>(j)) = (row[j] - mean[j]) / scale[j];
    }
    return z;
}

Eigen::Index LocfitModel::neighbours() const {
    const auto k = static_cast<Eigen::Index>(std::ceil(alpha * static_cast<double>(n()) - 1e-9));
    return std::clamp<Eigen::Index>(k, 1, n());
}

namespace {

Eigen::Index neighbour_count(double alpha, Eigen::Index n) {
    const auto k = static_cast<Eigen::Index>(std::ceil(alpha * static_cast<double>(n) - 1e-9));
    return std::clamp<Eigen::Index>(k, 1, n);
}

LocalRow weighted_mean_row(const Eigen::VectorXd& w) {
    LocalRow row;
    row.weights = w / w.sum();
    row.fallback = true;
    return row;
}

}  // namespace

LocalRow smoother_row(const Eigen::MatrixXd& scaled_x, const Eigen::VectorXd& z0, double alpha, int degree) {
    const Eigen::Index n = scaled_x.rows();
    const Eigen::Index p = scaled_x.cols();
    Eigen::VectorXd dist(n);
    for (Eigen::Index i = 0; i < n; ++i) dist(i) = (scaled_x.row(i).transpose() - z0).norm();

    std::vector<double> sorted(dist.data(), dist.data() + n);
    const Eigen::Index k = neighbour_count(alpha, n);
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
    const double h = sorted[static_cast<std::size_t>(k - 1)];

    if (h == 0.0) {
        Eigen::VectorXd w = (dist.array() == 0.0).cast<double>();
        LocalRow row;
        row.weights = w / w.sum();
        return row;
    }

    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (dist(i) < h) {
            const double u = dist(i) / h;
            const double t = 1.0 - u * u * u;
            w(i) = t * t * t;
            if (w(i) > 0.0) support.push_back(i);
        }
    }
    if (support.empty()) {
        // every neighbour sits exactly at distance h
        for (Eigen::Index i = 0; i < n; ++i) w(i) = dist(i) <= h ? 1.0 : 0.0;
        return weighted_mean_row(w);
    }

    // Local design over the support: intercept, linear, optional quadratic terms.
    const auto m = static_cast<Eigen::Index>(support.size());
    std::vector<Eigen::VectorXd> cols;
    cols.push_back(Eigen::VectorXd::Ones(m));
    Eigen::MatrixXd diff(m, p);
    for (Eigen::Index r = 0; r < m; ++r) diff.row(r) = scaled_x.row(support[static_cast<std::size_t>(r)]) - z0.transpose();
    for (Eigen::Index j = 0; j < p; ++j) cols.push_back(diff.col(j));
    if (degree == 2) {
        for (Eigen::Index a = 0; a < p; ++a) {
            for (Eigen::Index b = a; b < p; ++b) cols.push_back(diff.col(a).cwiseProduct(diff.col(b)));
        }
    }
    std::vector<Eigen::VectorXd> kept{cols.front()};
    for (std::size_t c = 1; c < cols.size(); ++c) {
        if (cols[c].cwiseAbs().maxCoeff() > 1e-12) kept.push_back(cols[c]);
    }
    const auto q = static_cast<Eigen::Index>(kept.size());
    if (m < q) return weighted_mean_row(w);

    Eigen::VectorXd sw(m);
    for (Eigen::Index r = 0; r < m; ++r) sw(r) = std::sqrt(w(support[static_cast<std::size_t>(r)]));
    Eigen::MatrixXd a(m, q);
    for (Eigen::Index c = 0; c < q; ++c) a.col(c) = kept[static_cast<std::size_t>(c)].cwiseProduct(sw);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < q) return weighted_mean_row(w);

    // Intercept row of (A'A)^-1 A' = P R^-1 Q', scaled back by sqrt(w).
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(q);
    e1(0) = 1.0;
    const Eigen::VectorXd pe = qr.colsPermutation().transpose() * e1;
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
    const Eigen::VectorXd u = r.transpose().triangularView<Eigen::Lower>().solve(pe);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(m);
    padded.head(q) = u;
    const Eigen::VectorXd qu = qr.householderQ() * padded;

    LocalRow row;
    row.weights = Eigen::VectorXd::Zero(n);
    for (Eigen::Index s = 0; s < m; ++s) row.weights(support[static_cast<std::size_t>(s)]) = qu(s) * sw(s);
    return row;
}

LocfitModel fit_locfit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha, int degree,
                       std::vector<std::string> predictors, const std::optional<std::vector<bool>>& indicator) {
    if (x.rows() != y.size()) throw ValidationError("locfit: x has " + std::to_string(x.rows()) + " rows, y has " + std::to_string(y.size()));
    if (x.rows() < 5) throw ValidationError("locfit: need at least 5 observations, got " + std::to_string(x.rows()));
    if (x.cols() < 1) throw ValidationError("locfit: need at least one predictor");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("locfit: alpha must lie in (0, 1]");
    if (degree != 1 && degree != 2) throw ValidationError("locfit: degree must be 1 or 2");
    if (!x.allFinite() || !y.allFinite()) throw ValidationError("locfit: non-finite training data");
    if (indicator && indicator->size() != static_cast<std::size_t>(x.cols())) {
        throw ValidationError("locfit: indicator mask size mismatch");
    }
    if (predictors.empty()) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) predictors.push_back("x" + std::to_string(j + 1));
    }
    if (predictors.size() != static_cast<std::size_t>(x.cols())) throw ValidationError("locfit: predictor name count mismatch");

    LocfitModel m;
    m.predictors = std::move(predictors);
    m.training_x = x;
    m.training_y = y;
    m.alpha = alpha;
    m.degree = degree;
    m.standardization = Standardization::from_training(x, indicator);
    m.scaled_x.resize(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Eigen::VectorXd row = x.row(i).transpose();
        m.scaled_x.row(i) = m.standardization.apply(std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))).transpose();
    }

    const Eigen::Index n = x.rows();
    m.fitted.resize(n);
    m.hat_diag.resize(n);
    m.fallback.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = smoother_row(m.scaled_x, m.scaled_x.row(i).transpose(), alpha, degree);
        m.fitted(i) = row.weights.dot(y);
        m.hat_diag(i) = row.weights(i);
        m.fallback[static_cast<std::size_t>(i)] = row.fallback;
    }
    m.hat_trace = m.hat_diag.sum();
    return m;
}

Prediction predict(const LocfitModel& model, std::span<const double> x0) {
    if (x0.size() != static_cast<std::size_t>(model.p())) {
        throw ValidationError("predict: expected " + std::to_string(model.p()) + " predictors, got " + std::to_string(x0.size()));
    }
    for (double v : x0) {
        if (!std::isfinite(v)) throw ValidationError("predict: non-finite predictor value");
    }
    const auto z0 = model.standardization.apply(x0);
    const auto row = smoother_row(model.scaled_x, z0, model.alpha, model.degree);
    return {row.weights.dot(model.training_y), row.fallback};
}

GcvResult gcv_score(double n, double rss, double trace) {
    // a trace within rounding of n is interpolation
    if (trace >= n * (1.0 - 1e-9)) return {std::numeric_limits<double>::infinity(), true};
    const double dof = n - trace;
    return {n * rss / (dof * dof), false};
}

GcvResult gcv(const LocfitModel& model) {
    const double rss = model.residuals().squaredNorm();
    return gcv_score(static_cast<double>(model.n()), rss, model.hat_trace);
}

std::string to_json(const LocfitModel& model) {
    nlohmann::ordered_json j;
    j["model_id"] = model.id;
    j["predictors"] = model.predictors;
    j["alpha"] = model.alpha;
    j["degree"] = model.degree;
    j["standardization"] = {{"mean", model.standardization.mean},
                            {"scale", model.standardization.scale},
                            {"indicator", model.standardization.indicator}};
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < model.n(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(model.p()));
        for (Eigen::Index c = 0; c < model.p(); ++c) r[static_cast<std::size_t>(c)] = model.training_x(i, c);
        rows.push_back(r);
    }
    j["training"] = {{"seasons", model.seasons},
                     {"x", rows},
                     {"y", std::vector<double>(model.training_y.data(), model.training_y.data() + model.n())}};
    j["hat_trace"] = model.hat_trace;
    const auto g = gcv(model);
    j["gcv"] = g.degenerate ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(g.value);
    return j.dump(2) + "\n";
}

LocfitModel from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        const auto predictors = j.at("predictors").get<std::vector<std::string>>();
        const auto rows = j.at("training").at("x").get<std::vector<std::vector<double>>>();
        const auto y = j.at("training").at("y").get<std::vector<double>>();
        const auto indicator = j.at("standardization").at("indicator").get<std::vector<bool>>();
        Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(predictors.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != predictors.size()) throw ValidationError("model JSON: ragged training row");
            for (std::size_t c = 0; c < predictors.size(); ++c) {
                x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
            }
        }
        Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
        auto m = fit_locfit(x, yv, j.at("alpha").get<double>(), j.at("degree").get<int>(), predictors, indicator);
        m.id = j.value("model_id", std::string{});
        m.seasons = j.at("training").value("seasons", std::vector<int>{});
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model JSON", 0, e.what());
    }
}

}  // namespace orcast::locfit
