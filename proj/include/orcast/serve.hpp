#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

namespace orcast::serve {

struct Response {
    int status = 200;
    std::string body;  // JSON
};

/// Read-only request handler over the artifacts in `out_dir`:
///   /distribution?season=&type=
///   /recommendation?season=&type=&tau=&p_high=&p_low=&tilt=
///   /payoffs?type=
/// Defaults for tau, p_high and p_low come from `defaults` (keys of the same names).
Response handle(const std::filesystem::path& out_dir, const std::string& path,
                const std::map<std::string, std::string>& params,
                const std::map<std::string, double>& defaults = {});

/// HTTP front end for `handle`. bind() with port 0 picks a free port and returns it.
class Server {
public:
    Server(const std::filesystem::path& out_dir, const std::map<std::string, double>& defaults);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    int bind(const std::string& host, int port);
    void listen();  // blocks until stop()
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Blocks serving `handle` over HTTP until the process is stopped.
void run_server(const std::filesystem::path& out_dir, const std::string& host, int port,
                const std::map<std::string, double>& defaults);

}  // namespace orcast::serve
