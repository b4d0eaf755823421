#include "orcast/serve.hpp"

#include <charconv>
#include <cmath>
#include <optional>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"
#include "orcast/csv.hpp"
#include "orcast/decision.hpp"
#include "orcast/errors.hpp"
#include "orcast/pipeline.hpp"
#include "orcast/prob_forecast.hpp"

// after the Eigen users: resolv.h defines a `_res` macro
#include "httplib.h"

namespace orcast::serve {

namespace fs = std::filesystem;

namespace {

Response error(int status, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = message;
    return {status, j.dump() + "\n"};
}

struct BadRequest {
    std::string message;
};

const std::string* param(const std::map<std::string, std::string>& params, const std::string& key) {
    auto it = params.find(key);
    return it == params.end() ? nullptr : &it->second;
}

OrangeType type_param(const std::map<std::string, std::string>& params) {
    const auto* v = param(params, "type");
    if (!v) throw BadRequest{"missing parameter `type`"};
    auto t = parse_orange_type(*v);
    if (!t) throw BadRequest{"type must be valencia or nonvalencia"};
    return *t;
}

int season_param(const std::map<std::string, std::string>& params) {
    const auto* v = param(params, "season");
    if (!v) throw BadRequest{"missing parameter `season`"};
    int s = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), s);
    if (ec != std::errc{} || p != v->data() + v->size()) throw BadRequest{"season must be an integer"};
    return s;
}

double real_param(const std::map<std::string, std::string>& params, const std::string& key, double fallback) {
    const auto* v = param(params, key);
    if (!v) return fallback;
    double x = 0.0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
    if (ec != std::errc{} || p != v->data() + v->size() || !std::isfinite(x)) {
        throw BadRequest{key + " must be a number"};
    }
    return x;
}

std::optional<std::string> read_artifact(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    return csv::read_file(path);
}

}  // namespace

Response handle(const fs::path& out_dir, const std::string& path, const std::map<std::string, std::string>& params,
                const std::map<std::string, double>& defaults) {
    auto fallback = [&](const std::string& key, double v) {
        auto it = defaults.find(key);
        return it == defaults.end() ? v : it->second;
    };
    try {
        if (path == "/distribution") {
            const auto type = type_param(params);
            const int season = season_param(params);
            const auto name = pipeline::distribution_file(type, season);
            auto text = read_artifact(out_dir / name);
            if (!text) return error(404, "no distribution artifact " + name);
            return {200, *text};
        }
        if (path == "/payoffs") {
            const auto name = pipeline::payoffs_file(type_param(params));
            auto text = read_artifact(out_dir / name);
            if (!text) return error(404, "no payoffs artifact " + name);
            return {200, *text};
        }
        if (path == "/recommendation") {
            const auto type = type_param(params);
            const int season = season_param(params);
            decision::DecisionParams dp;
            dp.tau = real_param(params, "tau", fallback("tau", dp.tau));
            dp.p_high = real_param(params, "p_high", fallback("p_high", dp.p_high));
            dp.p_low = real_param(params, "p_low", fallback("p_low", dp.p_low));
            auto dist_text = read_artifact(out_dir / pipeline::distribution_file(type, season));
            if (!dist_text) return error(404, "no distribution artifact " + pipeline::distribution_file(type, season));
            auto pay_text = read_artifact(out_dir / pipeline::payoffs_file(type));
            if (!pay_text) return error(404, "no payoffs artifact " + pipeline::payoffs_file(type));
            const auto dist = forecast::distribution_from_json(*dist_text);
            const auto payoffs = decision::payoffs_from_json(*pay_text);
            forecast::Tilt tilt = dist.tilt;
            if (const auto* t = param(params, "tilt")) {
                auto parsed = forecast::parse_tilt(*t);
                if (!parsed) throw BadRequest{"unknown tilt `" + *t + "`"};
                tilt = *parsed;
            }
            return {200, decision::to_json(decision::recommend(dist, payoffs, dp, tilt))};
        }
        return error(404, "unknown endpoint " + path);
    } catch (const BadRequest& e) {
        return error(400, e.message);
    } catch (const ValidationError& e) {
        return error(400, e.what());
    } catch (const Error& e) {
        return error(500, e.what());
    }
}

struct Server::Impl {
    httplib::Server http;
    fs::path out_dir;
    std::map<std::string, double> defaults;
};

Server::Server(const fs::path& out_dir, const std::map<std::string, double>& defaults)
    : impl_(std::make_unique<Impl>()) {
    impl_->out_dir = out_dir;
    impl_->defaults = defaults;
    auto route = [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> params;
        for (const auto& [k, v] : req.params) params[k] = v;
        const auto r = handle(impl->out_dir, req.path, params, impl->defaults);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    for (const char* endpoint : {"/distribution", "/payoffs", "/recommendation"}) impl_->http.Get(endpoint, route);
    impl_->http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
    if (port == 0) {
        const int p = impl_->http.bind_to_any_port(host);
        if (p < 0) throw IoError(fmt::format("cannot bind {}", host));
        return p;
    }
    if (!impl_->http.bind_to_port(host, port)) throw IoError(fmt::format("cannot listen on {}:{}", host, port));
    return port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

void run_server(const fs::path& out_dir, const std::string& host, int port,
                const std::map<std::string, double>& defaults) {
    Server server(out_dir, defaults);
    server.bind(host, port);
    spdlog::info("serving {} on http://{}:{}", out_dir.string(), host, port);
    server.listen();
}

}  // namespace orcast::serve
