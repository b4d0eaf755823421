#include "orcast/model_selection.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "orcast/csv.hpp"
#include "orcast/errors.hpp"

namespace orcast::locfit {

Design make_design(const features::PredictorMatrix& matrix, const std::map<int, double>& y,
                   const std::vector<std::string>& predictors) {
    std::vector<std::size_t> cols;
    Design d;
    for (const auto& name : predictors) {
        auto c = matrix.column_index(name);
        if (!c) throw ValidationError("predictor matrix has no column `" + name + "`");
        cols.push_back(*c);
        d.indicator.push_back(matrix.columns[*c].kind == features::ColumnKind::Indicator);
    }
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        if (!y.count(matrix.seasons[r])) continue;
        const bool complete = std::all_of(cols.begin(), cols.end(), [&](std::size_t c) {
            return matrix.quality[r][c] != features::Quality::Missing &&
                   std::isfinite(matrix.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        });
        if (complete) rows.push_back(r);
    }
    d.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    d.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d.seasons.push_back(matrix.seasons[rows[i]]);
        d.y(static_cast<Eigen::Index>(i)) = y.at(matrix.seasons[rows[i]]);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                matrix.values(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[c]));
        }
    }
    return d;
}

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    for (int i = 10; i <= 20; ++i) grid.push_back(i * 0.05);
    return grid;
}

namespace {

std::string subset_label(const std::vector<std::string>& names) {
    if (names.empty()) return "{}";
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
    return out + "}";
}

}  // namespace

GcvTable enumerate_models(const features::PredictorMatrix& matrix, const std::map<int, double>& y,
                          const std::vector<std::string>& mandatory, const std::vector<std::string>& optional,
                          const EnumerationOptions& options) {
    if (optional.size() > 8) throw ValidationError("at most 8 optional candidates can be enumerated");
    GcvTable table;
    table.variables = mandatory;
    for (const auto& o : optional) {
        if (std::find(table.variables.begin(), table.variables.end(), o) != table.variables.end()) {
            throw ValidationError("variable `" + o + "` listed twice");
        }
        table.variables.push_back(o);
    }
    const std::size_t v = table.variables.size();

    std::vector<std::vector<bool>> subsets;
    if (optional.empty()) {
        subsets.push_back(std::vector<bool>(v, true));
    } else if (options.mode == EnumerationMode::DropOne) {
        for (std::size_t drop = v; drop-- > 0;) {
            std::vector<bool> s(v, true);
            s[drop] = false;
            subsets.push_back(std::move(s));
        }
        subsets.push_back(std::vector<bool>(v, true));
    } else {
        const std::size_t m = optional.size();
        for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
            std::vector<bool> s(v, false);
            for (std::size_t i = 0; i < mandatory.size(); ++i) s[i] = true;
            for (std::size_t i = 0; i < m; ++i) s[mandatory.size() + i] = (mask >> i) & 1U;
            subsets.push_back(std::move(s));
        }
    }

    const std::vector<double> grid =
        options.fixed_alpha ? std::vector<double>{*options.fixed_alpha} : options.alpha_grid;
    if (grid.empty()) throw ValidationError("alpha grid is empty");

    for (const auto& subset : subsets) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < v; ++i) {
            if (subset[i]) names.push_back(table.variables[i]);
        }
        if (names.empty()) {
            table.skipped.push_back(subset_label(names) + ": empty predictor list");
            continue;
        }
        const auto design = make_design(matrix, y, names);
        if (design.y.size() < 5) {
            table.skipped.push_back(subset_label(names) + ": fewer than 5 complete seasons");
            continue;
        }
        GcvRow row;
        row.included = subset;
        row.predictors = names;
        row.n = static_cast<int>(design.y.size());
        bool first = true;
        for (double alpha : grid) {
            const auto model = fit_locfit(design.x, design.y, alpha, options.degree, names, design.indicator);
            const auto g = gcv(model);
            if (first || g.value < row.gcv || (g.value == row.gcv && alpha > row.alpha)) {
                row.gcv = g.value;
                row.alpha = alpha;
                row.degenerate = g.degenerate;
                first = false;
            }
        }
        table.rows.push_back(std::move(row));
    }
    for (const auto& s : table.skipped) spdlog::info("model enumeration skipped {}", s);
    if (table.rows.empty()) throw ValidationError("no predictor subset could be scored");

    auto better = [](const GcvRow& a, const GcvRow& b) {
        if (a.gcv != b.gcv) return a.gcv < b.gcv;
        if (a.predictors.size() != b.predictors.size()) return a.predictors.size() < b.predictors.size();
        return a.alpha > b.alpha;
    };
    table.best_row = 0;
    for (std::size_t r = 1; r < table.rows.size(); ++r) {
        if (better(table.rows[r], table.rows[table.best_row])) table.best_row = r;
    }
    return table;
}

std::string format_gcv_table(const GcvTable& table) {
    std::string out;
    for (const auto& v : table.variables) out += csv::escape(v) + ",";
    out += "alpha,gcv,best\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        for (bool inc : row.included) out += inc ? "1," : "0,";
        out += csv::format_real(row.alpha) + "," + (row.degenerate ? std::string("inf") : csv::format_real(row.gcv)) +
               "," + (r == table.best_row ? "1" : "0") + "\n";
    }
    return out;
}

std::vector<ModelPreset> preset_models() {
    using features::Phase;
    return {
        {"nonvalencia_cluster", OrangeType::NonValencia, PredictorScope::Cluster, Phase::PreForecast,
         {"Freezes", "Hurricanes", "C3_Jan4c"}, 0.65},
        {"nonvalencia_station", OrangeType::NonValencia, PredictorScope::Station, Phase::PreForecast,
         {"Freezes", "Hurricanes", "Collier_Jan4c"}, 0.65},
        {"valencia_cluster", OrangeType::Valencia, PredictorScope::Cluster, Phase::PreForecast,
         {"Freezes", "Hurricanes", "Cg", "C1_FMAQ75"}, 0.70},
        {"valencia_station", OrangeType::Valencia, PredictorScope::Station, Phase::PreForecast,
         {"Freezes", "Hurricanes", "Cg", "IndianRiver_MayQ75"}, 0.70},
        {"nonvalencia_post_cluster", OrangeType::NonValencia, PredictorScope::Cluster, Phase::PostForecast,
         {"Freezes", "Hurricanes", "C2_Dec4c"}, 0.65},
        {"valencia_post_cluster", OrangeType::Valencia, PredictorScope::Cluster, Phase::PostForecast,
         {"Freezes", "Hurricanes", "Cg", "C3_Dec4c"}, 0.70},
    };
}

ModelPreset find_preset(const std::string& name) {
    for (auto& p : preset_models()) {
        if (p.name == name) return p;
    }
    throw ConfigError("unknown model preset `" + name + "`");
}

}  // namespace orcast::locfit
