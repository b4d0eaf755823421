#include "orcast/prob_forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "orcast/errors.hpp"
#include "orcast/rng.hpp"

namespace orcast::forecast {

std::string_view to_string(Tilt tilt) {
    switch (tilt) {
        case Tilt::RaisesOverestimation: return "RaisesOverestimation";
        case Tilt::LowersOverestimation: return "LowersOverestimation";
        case Tilt::NoTilt: return "NoTilt";
        case Tilt::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::string_view to_string(Outlook outlook) {
    switch (outlook) {
        case Outlook::AboveNormal: return "AboveNormal";
        case Outlook::Normal: return "Normal";
        case Outlook::BelowNormal: return "BelowNormal";
        case Outlook::EqualChances: return "EqualChances";
    }
    return "EqualChances";
}

std::optional<Tilt> parse_tilt(std::string_view text) {
    for (auto t : {Tilt::RaisesOverestimation, Tilt::LowersOverestimation, Tilt::NoTilt, Tilt::Unknown}) {
        if (text == to_string(t)) return t;
    }
    return std::nullopt;
}

std::optional<Outlook> parse_outlook(std::string_view text) {
    for (auto o : {Outlook::AboveNormal, Outlook::Normal, Outlook::BelowNormal, Outlook::EqualChances}) {
        if (text == to_string(o)) return o;
    }
    return std::nullopt;
}

ErrorDistribution bootstrap_distribution(const locfit::LocfitModel& model, std::span<const double> x0,
                                         int replicates, std::uint64_t seed) {
    if (replicates < 100) throw ValidationError("bootstrap needs at least 100 replicates");
    const auto point = locfit::predict(model, x0);
    const auto z0 = model.standardization.apply(x0);
    const Eigen::Index n = model.n();

    std::vector<std::pair<double, Eigen::Index>> by_distance;
    for (Eigen::Index i = 0; i < n; ++i) by_distance.emplace_back((model.scaled_x.row(i).transpose() - z0).norm(), i);
    std::sort(by_distance.begin(), by_distance.end());
    const Eigen::Index k = model.neighbours();
    const double h = by_distance[static_cast<std::size_t>(k - 1)].first;

    std::vector<Eigen::Index> pool;
    std::vector<double> weight;
    if (h == 0.0) {
        for (const auto& [d, i] : by_distance) {
            if (d != 0.0) break;
            pool.push_back(i);
            weight.push_back(1.0);
        }
    } else {
        for (Eigen::Index r = 0; r < k; ++r) {
            const auto [d, i] = by_distance[static_cast<std::size_t>(r)];
            const double u = d / h;
            const double t = d < h ? 1.0 - u * u * u : 0.0;
            pool.push_back(i);
            weight.push_back(t * t * t);
        }
        if (std::accumulate(weight.begin(), weight.end(), 0.0) <= 0.0) std::fill(weight.begin(), weight.end(), 1.0);
    }
    std::vector<double> cumulative(weight.size());
    std::partial_sum(weight.begin(), weight.end(), cumulative.begin());
    const double total = cumulative.back();

    const Eigen::VectorXd residuals = model.residuals();
    const double scale = std::max(1.0, model.training_y.cwiseAbs().maxCoeff());
    ErrorDistribution dist;
    dist.point_estimate = point.value;
    dist.replicates = replicates;
    dist.seed = seed;
    dist.source_model = model.id;
    dist.degenerate = true;
    for (std::size_t j = 0; j < pool.size(); ++j) {
        if (weight[j] > 0.0 && std::abs(residuals(pool[j])) > 1e-9 * scale) dist.degenerate = false;
    }
    dist.samples.reserve(static_cast<std::size_t>(replicates));
    for (int b = 0; b < replicates; ++b) {
        auto rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(b));
        const double target = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        if (it == cumulative.end()) --it;
        const auto j = static_cast<std::size_t>(it - cumulative.begin());
        dist.samples.push_back(point.value + residuals(pool[j]));
    }
    std::sort(dist.samples.begin(), dist.samples.end());
    return dist;
}

double exceedance(const ErrorDistribution& dist, double tau) {
    if (dist.samples.empty()) return 0.0;
    const auto above = dist.samples.end() - std::upper_bound(dist.samples.begin(), dist.samples.end(), tau);
    return static_cast<double>(above) / static_cast<double>(dist.samples.size());
}

std::vector<std::pair<double, double>> cdf_points(const ErrorDistribution& dist) {
    std::vector<std::pair<double, double>> out;
    const auto total = static_cast<double>(dist.samples.size());
    for (std::size_t i = 0; i < dist.samples.size(); ++i) {
        if (i + 1 < dist.samples.size() && dist.samples[i + 1] == dist.samples[i]) continue;
        out.emplace_back(dist.samples[i], static_cast<double>(i + 1) / total);
    }
    return out;
}

Tilt outlook_tilt(int model_sign, Outlook outlook) {
    switch (outlook) {
        case Outlook::Normal: return Tilt::NoTilt;
        case Outlook::EqualChances: return Tilt::Unknown;
        case Outlook::BelowNormal:
            // colder December -> more cold days; positive effect raises %Error
            return model_sign >= 0 ? Tilt::RaisesOverestimation : Tilt::LowersOverestimation;
        case Outlook::AboveNormal:
            return model_sign >= 0 ? Tilt::LowersOverestimation : Tilt::RaisesOverestimation;
    }
    return Tilt::Unknown;
}

std::string to_json(const ErrorDistribution& dist) {
    nlohmann::ordered_json j;
    j["model_id"] = dist.source_model;
    j["season_year"] = dist.season_year ? nlohmann::ordered_json(*dist.season_year) : nlohmann::ordered_json(nullptr);
    j["orange_type"] = dist.orange_type ? nlohmann::ordered_json(std::string(to_string(*dist.orange_type)))
                                        : nlohmann::ordered_json(nullptr);
    j["point_estimate"] = dist.point_estimate;
    j["B"] = dist.replicates;
    j["seed"] = dist.seed;
    j["samples"] = dist.samples;
    j["tilt"] = std::string(to_string(dist.tilt));
    return j.dump(2) + "\n";
}

ErrorDistribution distribution_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        ErrorDistribution d;
        d.source_model = j.value("model_id", std::string{});
        if (j.contains("season_year") && !j["season_year"].is_null()) d.season_year = j["season_year"].get<int>();
        if (j.contains("orange_type") && !j["orange_type"].is_null()) {
            d.orange_type = parse_orange_type(j["orange_type"].get<std::string>());
        }
        d.point_estimate = j.at("point_estimate").get<double>();
        d.replicates = j.at("B").get<int>();
        d.seed = j.at("seed").get<std::uint64_t>();
        d.samples = j.at("samples").get<std::vector<double>>();
        if (static_cast<int>(d.samples.size()) != d.replicates) {
            throw ValidationError("distribution JSON: B does not match the number of samples");
        }
        std::sort(d.samples.begin(), d.samples.end());
        auto tilt = parse_tilt(j.value("tilt", std::string("Unknown")));
        if (!tilt) throw ValidationError("distribution JSON: unknown tilt");
        d.tilt = *tilt;
        d.degenerate = !d.samples.empty() && d.samples.front() == d.samples.back();
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("distribution JSON", 0, e.what());
    }
}

}  // namespace orcast::forecast
