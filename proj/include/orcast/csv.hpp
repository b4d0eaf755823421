#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orcast::csv {

/// Splits one CSV line on commas. Double-quoted fields may contain commas and `""` escapes.
std::vector<std::string> split_line(std::string_view line);

/// Line-oriented reader that validates the header and tracks 1-based line numbers.
class Reader {
public:
    /// Throws IoError when the file cannot be opened and ParseError when the header
    /// does not match `expected_header` (compared field by field, whitespace trimmed).
    Reader(const std::filesystem::path& path, const std::vector<std::string>& expected_header);

    /// Reads the next non-blank row; returns false at end of file. Throws ParseError on a
    /// field-count mismatch.
    bool next(std::vector<std::string>& fields);

    std::size_t line() const noexcept { return line_; }
    const std::string& name() const noexcept { return name_; }

    /// Header as read (only meaningful for readers built with an empty expected header).
    const std::vector<std::string>& header() const noexcept { return header_; }

    double real(const std::string& field, std::string_view column) const;
    std::optional<double> optional_real(const std::string& field, std::string_view column) const;
    long integer(const std::string& field, std::string_view column) const;

private:
    std::ifstream in_;
    std::string name_;
    std::vector<std::string> header_;
    std::size_t line_ = 0;
};

/// Shortest decimal representation that round-trips to the same double.
std::string format_real(double value);

/// Empty string for nullopt / NaN, else `format_real`.
std::string format_optional(std::optional<double> value);

/// Quotes a field when it contains a comma, quote, or newline.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

std::string trim(std::string_view s);

}  // namespace orcast::csv
