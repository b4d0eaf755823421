#include "orcast/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <spdlog/spdlog.h>

#include "orcast/csv.hpp"
#include "orcast/errors.hpp"
#include "orcast/rng.hpp"

namespace orcast::clustering {

namespace {

using Point = std::vector<double>;

double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct RunResult {
    std::vector<int> labels;  // 0-based cluster per point
    std::vector<Point> centroids;
    double inertia = 0.0;
    std::vector<double> trace;
    int iterations = 0;
};

std::vector<Point> farthest_point_init(const std::vector<Point>& points, int k, SplitMix64 rng) {
    std::vector<Point> centroids;
    std::vector<bool> chosen(points.size(), false);
    std::size_t first = rng.below(points.size());
    centroids.push_back(points[first]);
    chosen[first] = true;
    std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(centroids.size()) < k) {
        std::size_t pick = points.size();
        double best = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(points[i], centroids.back()));
            if (!chosen[i] && nearest[i] > best) {
                best = nearest[i];
                pick = i;
            }
        }
        centroids.push_back(points[pick]);
        chosen[pick] = true;
    }
    return centroids;
}

double inertia_of(const std::vector<Point>& points, const std::vector<int>& labels,
                  const std::vector<Point>& centroids) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        s += squared_distance(points[i], centroids[static_cast<std::size_t>(labels[i])]);
    }
    return s;
}

RunResult lloyd(const std::vector<Point>& points, std::vector<Point> centroids) {
    constexpr int kMaxIterations = 300;
    constexpr double kTolerance = 1e-9;
    const std::size_t n = points.size();
    const std::size_t k = centroids.size();
    const std::size_t dim = points.front().size();

    RunResult out;
    out.labels.assign(n, 0);
    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = squared_distance(points[i], centroids[c]);
                if (d < best) {
                    best = d;
                    out.labels[i] = static_cast<int>(c);
                }
            }
        }
        // Empty clusters take the point farthest from its centroid among clusters of size > 1.
        std::vector<int> sizes(k, 0);
        for (int l : out.labels) ++sizes[static_cast<std::size_t>(l)];
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto l = static_cast<std::size_t>(out.labels[i]);
                if (sizes[l] < 2) continue;
                const double d = squared_distance(points[i], centroids[l]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == n) continue;
            --sizes[static_cast<std::size_t>(out.labels[far])];
            out.labels[far] = static_cast<int>(c);
            sizes[c] = 1;
        }

        std::vector<Point> next(k, Point(dim, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            auto& acc = next[static_cast<std::size_t>(out.labels[i])];
            for (std::size_t d = 0; d < dim; ++d) acc[d] += points[i][d];
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) {
                next[c] = centroids[c];
                continue;
            }
            for (double& v : next[c]) v /= sizes[c];
            shift = std::max(shift, std::sqrt(squared_distance(next[c], centroids[c])));
        }
        centroids = std::move(next);
        out.trace.push_back(inertia_of(points, out.labels, centroids));
        out.iterations = iter;
        if (shift < kTolerance) break;
    }
    out.centroids = std::move(centroids);
    out.inertia = out.trace.back();
    return out;
}

}  // namespace

CountyYields align_yields(const std::map<std::string, std::map<int, double>>& raw) {
    CountyYields out;
    std::set<int> years;
    for (const auto& [county, obs] : raw) {
        for (const auto& [year, v] : obs) years.insert(year);
    }
    out.years.assign(years.begin(), years.end());
    for (const auto& [county, obs] : raw) {
        if (obs.empty()) throw ValidationError("county " + county + " has no yield observations");
        std::vector<double> s;
        s.reserve(out.years.size());
        for (int y : out.years) {
            auto hi = obs.lower_bound(y);
            if (hi != obs.end() && hi->first == y) {
                s.push_back(hi->second);
            } else if (hi == obs.begin()) {
                s.push_back(hi->second);
            } else if (hi == obs.end()) {
                s.push_back(std::prev(hi)->second);
            } else {
                auto lo = std::prev(hi);
                const double t = static_cast<double>(y - lo->first) / static_cast<double>(hi->first - lo->first);
                s.push_back(lo->second + t * (hi->second - lo->second));
            }
        }
        out.series[county] = std::move(s);
    }
    return out;
}

CountyYields load_county_yields(const std::filesystem::path& path) {
    csv::Reader reader(path, {"county", "year", "yield"});
    std::map<std::string, std::map<int, double>> raw;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f[0].empty()) throw ParseError(reader.name(), reader.line(), "empty county");
        const int year = static_cast<int>(reader.integer(f[1], "year"));
        auto& per = raw[f[0]];
        if (auto v = reader.optional_real(f[2], "yield")) {
            if (!per.emplace(year, *v).second) {
                throw ValidationError(reader.name() + ":" + std::to_string(reader.line()) + ": duplicate year " +
                                      std::to_string(year) + " for " + f[0]);
            }
        }
    }
    return align_yields(raw);
}

std::string cluster_id(int id) { return "C" + std::to_string(id); }

ClusterAssignment cluster_counties(const std::map<std::string, std::vector<double>>& yields, int k,
                                   std::uint64_t seed, int restarts) {
    const int n = static_cast<int>(yields.size());
    if (k < 1) throw ValidationError("k must be at least 1");
    if (k > n) {
        throw ValidationError("k = " + std::to_string(k) + " exceeds the number of counties (" + std::to_string(n) + ")");
    }
    if (restarts < 1) throw ValidationError("restarts must be at least 1");

    ClusterAssignment out;
    out.k = k;
    std::vector<std::string> names;
    std::vector<Point> points;
    const std::size_t dim = yields.begin()->second.size();
    for (const auto& [county, series] : yields) {
        if (series.size() != dim) throw ValidationError("yield series for " + county + " has a different length");
        if (series.empty()) throw ValidationError("yield series for " + county + " is empty");
        double mean = 0.0;
        for (double v : series) mean += v;
        mean /= static_cast<double>(dim);
        double var = 0.0;
        for (double v : series) var += (v - mean) * (v - mean);
        var /= static_cast<double>(dim);
        Point z(dim);
        if (var > 0.0) {
            const double sd = std::sqrt(var);
            for (std::size_t i = 0; i < dim; ++i) z[i] = (series[i] - mean) / sd;
        } else {
            spdlog::warn("yield series for {} is constant; left unscaled", county);
            out.unscaled.push_back(county);
            for (std::size_t i = 0; i < dim; ++i) z[i] = series[i] - mean;
        }
        names.push_back(county);
        points.push_back(std::move(z));
    }

    std::optional<RunResult> best;
    for (int r = 0; r < restarts; ++r) {
        auto init = farthest_point_init(points, k, SplitMix64::substream(seed, static_cast<std::uint64_t>(r)));
        auto run = lloyd(points, std::move(init));
        if (!best || run.inertia < best->inertia) {
            best = std::move(run);
            out.best_restart = r;
        }
    }

    // Canonical ids: first appearance in county-name order.
    std::vector<int> remap(static_cast<std::size_t>(k), -1);
    int next_id = 0;
    for (int label : best->labels) {
        if (remap[static_cast<std::size_t>(label)] < 0) remap[static_cast<std::size_t>(label)] = next_id++;
    }
    for (auto& m : remap) {
        if (m < 0) m = next_id++;
    }
    out.centroids.assign(static_cast<std::size_t>(k), {});
    for (int c = 0; c < k; ++c) {
        out.centroids[static_cast<std::size_t>(remap[static_cast<std::size_t>(c)])] =
            best->centroids[static_cast<std::size_t>(c)];
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        out.assignment[names[i]] = remap[static_cast<std::size_t>(best->labels[i])] + 1;
    }
    out.inertia = best->inertia;
    out.inertia_trace = best->trace;
    out.iterations = best->iterations;
    return out;
}

std::string format_assignment(const ClusterAssignment& assignment) {
    std::string out = "county,cluster_id\n";
    for (const auto& [county, id] : assignment.assignment) {
        out += csv::escape(county) + "," + cluster_id(id) + "\n";
    }
    return out;
}

ClusterAssignment load_assignment(const std::filesystem::path& path) {
    csv::Reader reader(path, {"county", "cluster_id"});
    ClusterAssignment out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const auto& id = f[1];
        if (id.size() < 2 || id[0] != 'C') throw ParseError(reader.name(), reader.line(), "bad cluster id `" + id + "`");
        const int n = static_cast<int>(reader.integer(id.substr(1), "cluster_id"));
        if (n < 1) throw ParseError(reader.name(), reader.line(), "bad cluster id `" + id + "`");
        if (!out.assignment.emplace(f[0], n).second) {
            throw ValidationError(reader.name() + ":" + std::to_string(reader.line()) + ": county " + f[0] +
                                  " assigned twice");
        }
        out.k = std::max(out.k, n);
    }
    return out;
}

features::PredictorMatrix aggregate_cluster_features(const features::PredictorMatrix& stations,
                                                     const ClusterAssignment& assignment) {
    using features::ColumnKind;
    using features::Quality;

    std::map<std::string, int> by_label;
    for (const auto& [county, id] : assignment.assignment) by_label[features::scope_label(county)] = id;

    // (cluster, feature) -> member station columns
    std::vector<std::string> feature_order;
    std::map<std::pair<int, std::string>, std::vector<std::size_t>> members;
    std::vector<std::size_t> indicators;
    for (std::size_t c = 0; c < stations.cols(); ++c) {
        const auto& col = stations.columns[c];
        if (col.kind == ColumnKind::Indicator) {
            indicators.push_back(c);
            continue;
        }
        auto it = by_label.find(col.scope);
        if (it == by_label.end()) {
            throw ValidationError("column " + col.name + ": county `" + col.scope + "` has no cluster assignment");
        }
        if (std::find(feature_order.begin(), feature_order.end(), col.feature) == feature_order.end()) {
            feature_order.push_back(col.feature);
        }
        members[{it->second, col.feature}].push_back(c);
    }

    features::PredictorMatrix out;
    out.phase = stations.phase;
    out.seasons = stations.seasons;
    std::vector<std::vector<std::size_t>> sources;
    for (std::size_t c : indicators) out.columns.push_back(stations.columns[c]);
    for (int id = 1; id <= assignment.k; ++id) {
        for (const auto& f : feature_order) {
            auto it = members.find({id, f});
            if (it == members.end()) continue;
            out.columns.push_back({cluster_id(id) + "_" + f, ColumnKind::Climate, cluster_id(id), f});
            sources.push_back(it->second);
        }
    }

    const auto rows = static_cast<Eigen::Index>(out.rows());
    out.values.resize(rows, static_cast<Eigen::Index>(out.cols()));
    out.quality.assign(out.rows(), std::vector<Quality>(out.cols(), Quality::Ok));
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto ru = static_cast<std::size_t>(r);
        std::size_t c = 0;
        for (std::size_t src : indicators) {
            out.values(r, static_cast<Eigen::Index>(c)) = stations.values(r, static_cast<Eigen::Index>(src));
            out.quality[ru][c] = stations.quality[ru][src];
            ++c;
        }
        for (const auto& group : sources) {
            double sum = 0.0;
            int present = 0;
            bool degraded = false;
            for (std::size_t src : group) {
                const auto q = stations.quality[ru][src];
                if (q == Quality::Missing) {
                    degraded = true;
                    continue;
                }
                if (q == Quality::Imputed) degraded = true;
                sum += stations.values(r, static_cast<Eigen::Index>(src));
                ++present;
            }
            if (present == 0) {
                out.values(r, static_cast<Eigen::Index>(c)) = features::kNaN;
                out.quality[ru][c] = Quality::Missing;
            } else {
                out.values(r, static_cast<Eigen::Index>(c)) = sum / present;
                out.quality[ru][c] = degraded ? Quality::Imputed : Quality::Ok;
            }
            ++c;
        }
    }
    return out;
}

}  // namespace orcast::clustering
