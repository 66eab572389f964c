#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"

namespace survkit {

/// Flat key = value configuration text: one assignment per line, '#' starts a
/// comment, lists are comma-separated. Values are inert strings until a typed
/// getter parses them; nothing in a config is ever executed.
class ConfigMap {
public:
    static ConfigMap from_file(const std::string& path);
    static ConfigMap from_text(const std::string& text, const std::string& source);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return values_; }
    const std::string& source() const { return source_; }

    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key) const;
    std::size_t get_size_or(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_uint64_or(const std::string& key, std::uint64_t fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;
    std::vector<std::string> get_list_or(const std::string& key,
                                         const std::vector<std::string>& fallback) const;
    std::vector<double> get_double_list_or(const std::string& key,
                                           const std::vector<double>& fallback) const;

    /// Rejects keys outside the known set; prefixes listed in
    /// known_prefixes admit any suffix (used for per-learner grids).
    void check_keys(const std::set<std::string>& known,
                    const std::vector<std::string>& known_prefixes = {}) const;

private:
    std::map<std::string, std::string> values_;
    std::string source_;

    [[noreturn]] void bad_value(const std::string& key, const std::string& expected) const;
};

}  // namespace survkit
