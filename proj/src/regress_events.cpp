#include "orcast/regress_events.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include "json.hpp"
#include <spdlog/spdlog.h>

#include "orcast/csv.hpp"
#include "orcast/errors.hpp"

namespace orcast::events {

namespace {

int rank_of(const Eigen::MatrixXd& m) {
    if (m.cols() == 0) return 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    qr.setThreshold(1e-10);
    return static_cast<int>(qr.rank());
}

}  // namespace

EventRegressionFit fit_event_regression(const std::map<int, double>& errors, const EventCalendar& calendar,
                                        bool include_intercept) {
    if (errors.empty()) throw NumericalError("event regression needs at least one season");
    const auto n = static_cast<Eigen::Index>(errors.size());

    struct Candidate {
        std::string name;
        Eigen::VectorXd column;
    };
    std::vector<Candidate> all;
    if (include_intercept) all.push_back({"intercept", Eigen::VectorXd::Ones(n)});
    Eigen::VectorXd fr(n), hu(n), cg(n), y(n);
    Eigen::Index i = 0;
    for (const auto& [season, err] : errors) {
        fr(i) = calendar.freeze(season);
        hu(i) = calendar.hurricane(season);
        cg(i) = calendar.greening(season);
        y(i) = err;
        ++i;
    }
    all.push_back({"Freezes", fr});
    all.push_back({"Hurricanes", hu});
    all.push_back({"Cg", cg});

    EventRegressionFit fit;
    fit.has_intercept = include_intercept;
    std::vector<std::string> kept;
    Eigen::MatrixXd design(n, 0);
    for (const auto& c : all) {
        Eigen::MatrixXd trial(n, design.cols() + 1);
        trial << design, c.column;
        if (rank_of(trial) > design.cols()) {
            design = std::move(trial);
            kept.push_back(c.name);
        } else {
            spdlog::warn("event regression: column {} is constant or collinear; dropped", c.name);
            fit.dropped.push_back(c.name);
        }
    }
    if (kept.empty()) throw NumericalError("event regression: every design column was dropped");

    const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        const double b = beta(static_cast<Eigen::Index>(k));
        if (kept[k] == "intercept") fit.intercept = b;
        else if (kept[k] == "Freezes") fit.freezes = b;
        else if (kept[k] == "Hurricanes") fit.hurricanes = b;
        else fit.greening = b;
    }
    const Eigen::VectorXd pred = design * beta;

    double ssr = 0.0;
    double sst = 0.0;
    const double mean = y.mean();
    i = 0;
    for (const auto& [season, err] : errors) {
        fit.observed[season] = err;
        fit.fitted[season] = pred(i);
        fit.residuals[season] = err - pred(i);
        ssr += (err - pred(i)) * (err - pred(i));
        const double base = include_intercept ? err - mean : err;
        sst += base * base;
        ++i;
    }
    fit.r_squared = sst > 0.0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 1.0;
    return fit;
}

std::map<int, double> errors_by_season(const std::vector<SeasonRecord>& records) {
    std::map<int, double> out;
    for (const auto& r : records) out[r.season_year] = r.pct_error;
    return out;
}

std::string format_event_fit(const EventRegressionFit& fit) {
    nlohmann::ordered_json j;
    j["intercept"] = fit.intercept;
    j["include_intercept"] = fit.has_intercept;
    j["freezes"] = fit.freezes;
    j["hurricanes"] = fit.hurricanes;
    j["greening"] = fit.greening;
    j["dropped"] = fit.dropped;
    j["r_squared"] = fit.r_squared;
    auto& res = j["residuals"] = nlohmann::ordered_json::array();
    for (const auto& [season, r] : fit.residuals) {
        res.push_back({{"season_year", season}, {"observed", fit.observed.at(season)}, {"residual", r}});
    }
    return j.dump(2) + "\n";
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return features::kNaN;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

double mutual_information(std::span<const double> x, std::span<const double> y, int bins) {
    const std::size_t n = x.size();
    auto binned = [&](std::span<const double> v) {
        const auto ranks = average_ranks(v);
        std::vector<int> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int b = static_cast<int>(std::floor(bins * (ranks[i] - 1.0) / static_cast<double>(n)));
            out[i] = std::min(bins - 1, b);
        }
        return out;
    };
    const auto bx = binned(x);
    const auto by = binned(y);
    std::vector<double> joint(static_cast<std::size_t>(bins * bins), 0.0);
    std::vector<double> px(static_cast<std::size_t>(bins), 0.0), py(static_cast<std::size_t>(bins), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        joint[static_cast<std::size_t>(bx[i] * bins + by[i])] += 1.0;
        px[static_cast<std::size_t>(bx[i])] += 1.0;
        py[static_cast<std::size_t>(by[i])] += 1.0;
    }
    double mi = 0.0;
    const double dn = static_cast<double>(n);
    for (int a = 0; a < bins; ++a) {
        for (int b = 0; b < bins; ++b) {
            const double c = joint[static_cast<std::size_t>(a * bins + b)];
            if (c == 0.0) continue;
            mi += c / dn * std::log(c * dn / (px[static_cast<std::size_t>(a)] * py[static_cast<std::size_t>(b)]));
        }
    }
    return std::max(0.0, mi);
}

std::vector<std::string> ScreeningReport::ranking(Statistic statistic) const {
    std::vector<const CandidateScreen*> live;
    for (const auto& c : candidates) {
        if (!c.skipped) live.push_back(&c);
    }
    auto key = [statistic](const CandidateScreen* c) {
        switch (statistic) {
            case Statistic::Pearson: return std::abs(c->pearson_r);
            case Statistic::Spearman: return std::abs(c->spearman_rho);
            case Statistic::MutualInformation: return c->mutual_information_nats;
        }
        return 0.0;
    };
    std::stable_sort(live.begin(), live.end(), [&](auto* a, auto* b) { return key(a) > key(b); });
    std::vector<std::string> out;
    for (const auto* c : live) out.push_back(c->name);
    return out;
}

const CandidateScreen* ScreeningReport::find(std::string_view name) const {
    for (const auto& c : candidates) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

ScreeningReport screen_predictors(const std::map<int, double>& residuals,
                                  const features::PredictorMatrix& candidates, int min_overlap, int bins) {
    ScreeningReport report;
    for (std::size_t c = 0; c < candidates.cols(); ++c) {
        const auto& col = candidates.columns[c];
        if (col.kind == features::ColumnKind::Indicator) continue;
        CandidateScreen s;
        s.name = col.name;
        std::vector<double> x, y;
        for (std::size_t r = 0; r < candidates.rows(); ++r) {
            auto it = residuals.find(candidates.seasons[r]);
            if (it == residuals.end() || candidates.quality[r][c] == features::Quality::Missing) continue;
            const double v = candidates.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (std::isnan(v)) continue;
            x.push_back(v);
            y.push_back(it->second);
        }
        s.n_effective = static_cast<int>(x.size());
        if (s.n_effective < min_overlap) {
            s.skipped = true;
            s.reason = "only " + std::to_string(s.n_effective) + " overlapping seasons";
        } else if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
            s.skipped = true;
            s.reason = "zero variance";
        } else {
            s.pearson_r = pearson(x, y);
            s.spearman_rho = spearman(x, y);
            s.mutual_information_nats = mutual_information(x, y, bins);
        }
        report.candidates.push_back(std::move(s));
    }
    std::sort(report.candidates.begin(), report.candidates.end(),
              [](const CandidateScreen& a, const CandidateScreen& b) { return a.name < b.name; });
    return report;
}

std::string format_screening(const ScreeningReport& report) {
    std::string out = "candidate,pearson_r,spearman_rho,mi_nats,n\n";
    for (const auto& c : report.candidates) {
        out += csv::escape(c.name) + "," + csv::format_optional(c.pearson_r) + "," +
               csv::format_optional(c.spearman_rho) + "," + csv::format_optional(c.mutual_information_nats) + "," +
               std::to_string(c.n_effective) + "\n";
    }
    return out;
}

std::string format_scatter(const std::map<int, double>& residuals, const features::PredictorMatrix& candidates,
                           std::size_t column) {
    std::string out = "season_year,residual,value\n";
    for (std::size_t r = 0; r < candidates.rows(); ++r) {
        auto it = residuals.find(candidates.seasons[r]);
        if (it == residuals.end() || candidates.quality[r][column] == features::Quality::Missing) continue;
        out += std::to_string(candidates.seasons[r]) + "," + csv::format_real(it->second) + "," +
               csv::format_real(candidates.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(column))) +
               "\n";
    }
    return out;
}

}  // namespace orcast::events
