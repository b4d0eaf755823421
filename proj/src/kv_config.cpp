#include "orcast/kv_config.hpp"

#include <charconv>
#include <sstream>

#include "orcast/csv.hpp"
#include "orcast/errors.hpp"

namespace orcast {

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
    return parse(csv::read_file(path), path.string());
}

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
    KeyValueFile out;
    out.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string s = csv::trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError(origin, line, "expected `key = value`");
        std::string key = csv::trim(std::string_view(s).substr(0, eq));
        std::string value = csv::trim(std::string_view(s).substr(eq + 1));
        if (key.empty()) throw ParseError(origin, line, "empty key");
        if (!out.values_.emplace(key, value).second) {
            throw ParseError(origin, line, "duplicate key `" + key + "`");
        }
    }
    return out;
}

const std::string& KeyValueFile::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(origin_ + ": missing key `" + key + "`");
    return it->second;
}

std::string KeyValueFile::get_or(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

namespace {

std::vector<std::string> tokens(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',' || c == ' ' || c == '\t' || c == '[' || c == ']') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

std::vector<int> KeyValueFile::int_list(const std::string& key) const {
    std::vector<int> out;
    for (const auto& t : tokens(get(key))) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size()) {
            throw ConfigError(origin_ + ": bad integer `" + t + "` in `" + key + "`");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<double> KeyValueFile::real_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& t : tokens(get(key))) {
        double v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size()) {
            throw ConfigError(origin_ + ": bad number `" + t + "` in `" + key + "`");
        }
        out.push_back(v);
    }
    return out;
}

double KeyValueFile::real(const std::string& key) const {
    auto v = real_list(key);
    if (v.size() != 1) throw ConfigError(origin_ + ": `" + key + "` must be a single number");
    return v.front();
}

long KeyValueFile::integer(const std::string& key) const {
    auto v = int_list(key);
    if (v.size() != 1) throw ConfigError(origin_ + ": `" + key + "` must be a single integer");
    return v.front();
}

}  // namespace orcast
