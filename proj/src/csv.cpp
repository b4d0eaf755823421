#include "orcast/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "orcast/errors.hpp"

namespace orcast::csv {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else if (c != '\r' && c != '\n') {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

Reader::Reader(const std::filesystem::path& path, const std::vector<std::string>& expected_header)
    : in_(path), name_(path.string()) {
    if (!in_) {
        throw IoError("cannot open " + name_);
    }
    std::string text;
    if (!std::getline(in_, text)) {
        throw ParseError(name_, 1, "missing header");
    }
    line_ = 1;
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        text.erase(0, 3);
    }
    header_ = split_line(text);
    if (expected_header.empty()) return;
    if (header_ != expected_header) {
        std::string want;
        for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
        throw ParseError(name_, 1, "unexpected header, want `" + want + "`");
    }
}

bool Reader::next(std::vector<std::string>& fields) {
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        if (trim(text).empty()) continue;
        fields = split_line(text);
        if (fields.size() != header_.size()) {
            throw ParseError(name_, line_,
                             "expected " + std::to_string(header_.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        }
        return true;
    }
    return false;
}

double Reader::real(const std::string& field, std::string_view column) const {
    auto v = optional_real(field, column);
    if (!v) {
        throw ParseError(name_, line_, "missing value for " + std::string(column));
    }
    return *v;
}

std::optional<double> Reader::optional_real(const std::string& field, std::string_view column) const {
    if (field.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw ParseError(name_, line_, "bad number `" + field + "` in " + std::string(column));
    }
    return value;
}

long Reader::integer(const std::string& field, std::string_view column) const {
    long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(name_, line_, "bad integer `" + field + "` in " + std::string(column));
    }
    return value;
}

std::string format_real(double value) {
    if (value == 0.0) return "0";  // folds -0
    char buf[512];
    const double mag = std::abs(value);
    const auto fmt = mag >= 1e-4 && mag < 1e15 ? std::chars_format::fixed : std::chars_format::general;
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, fmt);
    return std::string(buf, ptr);
}

std::string format_optional(std::optional<double> value) {
    if (!value || std::isnan(*value)) return {};
    return format_real(*value);
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace orcast::csv
