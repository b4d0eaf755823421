#pragma once

#include <stdexcept>
#include <string>

namespace orcast {

/// Process exit status associated with each error family.
enum class ExitCode : int {
    Ok = 0,
    Validation = 1,
    Io = 2,
    Numerical = 3,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, std::string kind, const std::string& message)
        : std::runtime_error(message), code_(code), kind_(std::move(kind)) {}

    ExitCode code() const noexcept { return code_; }
    const std::string& kind() const noexcept { return kind_; }

private:
    ExitCode code_;
    std::string kind_;
};

/// Malformed input text. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& message)
        : Error(ExitCode::Validation, "parse",
                file + (line > 0 ? ":" + std::to_string(line) : std::string{}) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ExitCode::Validation, "validation", message) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message)
        : Error(ExitCode::Validation, "config", message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ExitCode::Io, "io", message) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& message)
        : Error(ExitCode::Numerical, "numerical", message) {}
};

}  // namespace orcast
