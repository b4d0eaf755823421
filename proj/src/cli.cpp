#include "orcast/cli.hpp"

#include <map>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "orcast/errors.hpp"
#include "orcast/pipeline.hpp"

namespace orcast::cli {

namespace {

std::string escape_message(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

void use_stderr_logger(const std::string& level) {
    auto logger = spdlog::get("orcast");
    if (!logger) logger = spdlog::stderr_logger_st("orcast");
    logger->set_pattern("[%l] %v");
    logger->set_level(spdlog::level::from_str(level));
    spdlog::set_default_logger(logger);
}

std::string flag_names(const std::string& key) {
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    return dashed == key ? "--" + key : "--" + key + ",--" + dashed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Orange forecast error modelling and hedging decisions"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path;
    std::string out_dir = "out";
    std::string log_level = "info";
    app.add_option("--config", config_path, "key = value pipeline config");
    app.add_option("--out-dir,--out_dir", out_dir, "artifact directory (default: out)");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    std::map<std::string, std::string> overrides;
    std::map<std::string, std::string> raw;
    for (const auto& [key, help] : pipeline::config_keys()) {
        app.add_option(flag_names(key), raw[key], help);
    }

    static const std::map<std::string, std::string> descriptions{
        {"ingest", "validate inputs; write seasons, errors, stations and prices"},
        {"features", "station climate predictors for both phases"},
        {"cluster", "k-means on county yields and cluster-mean predictors"},
        {"screen", "event regression and predictor screening"},
        {"fit", "fit the preset local regression model"},
        {"select", "GCV table over predictor subsets"},
        {"forecast", "bootstrap error distribution for a season"},
        {"gains", "long/short payoff estimates from prices"},
        {"decide", "scenario, position and EMV recommendation"},
        {"synth", "write a deterministic synthetic dataset"},
        {"serve", "read-only JSON endpoints over the artifacts"},
    };
    for (const auto& name : pipeline::subcommands()) app.add_subcommand(name, descriptions.at(name))->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (dynamic_cast<const CLI::CallForHelp*>(&e) || dynamic_cast<const CLI::CallForAllHelp*>(&e)
                        ? app.help()
                        : std::string(e.what()) + "\n");
            return 0;
        }
        err << "error kind=usage message=\"" << escape_message(e.what()) << "\"\n";
        return static_cast<int>(ExitCode::Validation);
    }

    for (const auto& [key, help] : pipeline::config_keys()) {
        if (app.count(flag_names(key).substr(0, flag_names(key).find(','))) > 0) overrides[key] = raw[key];
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        use_stderr_logger(log_level);
        const auto config = pipeline::PipelineConfig::load(
            config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt, overrides);
        pipeline::run_subcommand(command, config, out_dir);
        return 0;
    } catch (const Error& e) {
        err << "error kind=" << e.kind() << " message=\"" << escape_message(e.what()) << "\"\n";
        return static_cast<int>(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error kind=io message=\"" << escape_message(e.what()) << "\"\n";
        return static_cast<int>(ExitCode::Io);
    } catch (const std::exception& e) {
        err << "error kind=internal message=\"" << escape_message(e.what()) << "\"\n";
        return static_cast<int>(ExitCode::Numerical);
    }
}

}  // namespace orcast::cli
