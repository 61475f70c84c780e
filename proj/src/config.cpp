#include "gazeaffect/config.hpp"

#include <charconv>
#include <cmath>

#include "gazeaffect/data_io.hpp"
#include "gazeaffect/error.hpp"

namespace gazeaffect::config {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw Error(Errc::InvalidConfig, where + ": " + msg);
}

std::optional<double> parse_number(std::string_view s) {
    std::string cleaned;
    for (char c : s) {
        if (c != '_') cleaned += c;
    }
    if (!cleaned.empty() && cleaned.front() == '+') cleaned.erase(0, 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), v);
    if (ec != std::errc{} || ptr != cleaned.data() + cleaned.size()) return std::nullopt;
    return v;
}

std::string parse_string(std::string_view s, const std::string& where) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') fail(where, "bad string literal");
    return std::string(s.substr(1, s.size() - 2));
}

Value parse_value(std::string_view s, const std::string& where) {
    s = trim(s);
    if (s.empty()) fail(where, "missing value");
    if (s == "true") return true;
    if (s == "false") return false;
    if (s.front() == '"') return parse_string(s, where);
    if (s.front() == '[') {
        if (s.back() != ']') fail(where, "unterminated array");
        std::string_view body = trim(s.substr(1, s.size() - 2));
        std::vector<double> nums;
        std::vector<std::string> strs;
        while (!body.empty()) {
            std::size_t comma = body.find(',');
            std::string_view item = trim(body.substr(0, comma));
            body = comma == std::string_view::npos ? std::string_view{} : trim(body.substr(comma + 1));
            if (item.empty()) continue;
            if (item.front() == '"') {
                strs.push_back(parse_string(item, where));
            } else if (auto v = parse_number(item)) {
                nums.push_back(*v);
            } else {
                fail(where, "bad array item '" + std::string(item) + "'");
            }
        }
        if (!nums.empty() && !strs.empty()) fail(where, "mixed array");
        if (!strs.empty()) return strs;
        return nums;
    }
    if (auto v = parse_number(s)) return *v;
    fail(where, "cannot parse value '" + std::string(s) + "'");
}

}  // namespace

Document Document::parse(std::string_view text, const std::string& source) {
    Document doc;
    std::string section;
    std::size_t line_no = 0;
    std::string pending;  // multi-line array accumulator
    std::string pending_key;
    std::size_t pending_line = 0;
    while (!text.empty()) {
        std::size_t nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        std::string_view line = trim(strip_comment(raw));
        if (!pending_key.empty()) {
            pending += ' ';
            pending += line;
            if (line.find(']') != std::string_view::npos) {
                doc.values_[pending_key] = parse_value(pending, source + ":" + std::to_string(pending_line));
                pending_key.clear();
                pending.clear();
            }
            continue;
        }
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        if (line.front() == '[' && line.find('=') == std::string_view::npos) {
            if (line.back() != ']') fail(where, "bad section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) fail(where, "expected key = value");
        std::string key(trim(line.substr(0, eq)));
        if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
        if (key.empty()) fail(where, "empty key");
        std::string full = section.empty() ? key : section + "." + key;
        std::string_view value = trim(line.substr(eq + 1));
        if (!value.empty() && value.front() == '[' && value.find(']') == std::string_view::npos) {
            pending_key = full;
            pending = std::string(value);
            pending_line = line_no;
            continue;
        }
        doc.values_[full] = parse_value(value, where);
    }
    if (!pending_key.empty()) fail(source, "unterminated array for '" + pending_key + "'");
    return doc;
}

Document Document::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(Errc::MissingInput, path.string());
    return parse(io::read_file(path), path.string());
}

void Document::merge(const Document& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
}

const Value* Document::find(std::string_view key) const {
    auto it = values_.find(std::string(key));
    return it == values_.end() ? nullptr : &it->second;
}

double Document::number(std::string_view key, double fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (const double* d = std::get_if<double>(v)) return *d;
    throw Error(Errc::InvalidConfig, "'" + std::string(key) + "' is not a number");
}

bool Document::boolean(std::string_view key, bool fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (const bool* b = std::get_if<bool>(v)) return *b;
    throw Error(Errc::InvalidConfig, "'" + std::string(key) + "' is not a boolean");
}

std::string Document::string(std::string_view key, const std::string& fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (const std::string* s = std::get_if<std::string>(v)) return *s;
    throw Error(Errc::InvalidConfig, "'" + std::string(key) + "' is not a string");
}

std::optional<std::vector<double>> Document::numbers(std::string_view key) const {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (const auto* a = std::get_if<std::vector<double>>(v)) return *a;
    throw Error(Errc::InvalidConfig, "'" + std::string(key) + "' is not a numeric array");
}

std::optional<std::vector<std::string>> Document::strings(std::string_view key) const {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (const auto* a = std::get_if<std::vector<std::string>>(v)) return *a;
    if (const auto* a = std::get_if<std::vector<double>>(v); a && a->empty()) return std::vector<std::string>{};
    throw Error(Errc::InvalidConfig, "'" + std::string(key) + "' is not a string array");
}

std::string Document::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k + " = ";
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, bool>) {
                    out += x ? "true" : "false";
                } else if constexpr (std::is_same_v<T, double>) {
                    out += io::format_roundtrip(x);
                } else if constexpr (std::is_same_v<T, std::string>) {
                    out += '"' + x + '"';
                } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                    out += '[';
                    for (std::size_t i = 0; i < x.size(); ++i) out += (i ? "," : "") + io::format_roundtrip(x[i]);
                    out += ']';
                } else {
                    out += '[';
                    for (std::size_t i = 0; i < x.size(); ++i) out += (i ? ",\"" : "\"") + x[i] + '"';
                    out += ']';
                }
            },
            v);
        out += '\n';
    }
    return out;
}

}  // namespace gazeaffect::config
