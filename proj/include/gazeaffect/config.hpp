#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gazeaffect::config {

/// Values from a small TOML subset: `[section]` headers, `key = value` lines with
/// numbers, booleans, double-quoted strings, and (possibly multi-line) arrays of
/// numbers or strings. Keys are addressed as "section.key".
using Value = std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>>;

class Document {
public:
    static Document parse(std::string_view text, const std::string& source = "<string>");
    static Document load(const std::filesystem::path& path);

    /// Keys in `other` override keys here.
    void merge(const Document& other);

    bool has(std::string_view key) const { return values_.count(std::string(key)) != 0; }
    bool empty() const { return values_.empty(); }

    double number(std::string_view key, double fallback) const;
    bool boolean(std::string_view key, bool fallback) const;
    std::string string(std::string_view key, const std::string& fallback) const;
    std::optional<std::vector<double>> numbers(std::string_view key) const;
    std::optional<std::vector<std::string>> strings(std::string_view key) const;

    /// Sorted `key = value` dump; stable input for config hashing.
    std::string canonical() const;

    void set(const std::string& key, Value v) { values_[key] = std::move(v); }

private:
    const Value* find(std::string_view key) const;

    std::map<std::string, Value> values_;
};

}  // namespace gazeaffect::config
