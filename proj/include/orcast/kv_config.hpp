#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace orcast {

/// Plain-text `key = value` file. Blank lines and `#` comments are ignored; a repeated key
/// is a parse error. Values keep interior whitespace.
class KeyValueFile {
public:
    static KeyValueFile load(const std::filesystem::path& path);
    static KeyValueFile parse(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;

    /// Comma- or whitespace-separated integer list; empty value yields an empty list.
    std::vector<int> int_list(const std::string& key) const;
    std::vector<double> real_list(const std::string& key) const;
    double real(const std::string& key) const;
    long integer(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::string origin_;
    std::map<std::string, std::string> values_;
};

}  // namespace orcast
