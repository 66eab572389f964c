#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace survkit {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

ConfigMap ConfigMap::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) fail(ErrorCode::Config, "cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str(), path);
}

ConfigMap ConfigMap::from_text(const std::string& text, const std::string& source) {
    ConfigMap cfg;
    cfg.source_ = source;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::Config, source + " line " + std::to_string(lineno) +
                                        ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            fail(ErrorCode::Config,
                 source + " line " + std::to_string(lineno) + ": empty key");
        }
        if (!cfg.values_.emplace(key, value).second) {
            fail(ErrorCode::Config, source + " line " + std::to_string(lineno) +
                                        ": duplicate key '" + key + "'");
        }
    }
    return cfg;
}

void ConfigMap::bad_value(const std::string& key, const std::string& expected) const {
    fail(ErrorCode::Config, source_ + ": key '" + key + "' expects " + expected + ", got '" +
                                values_.at(key) + "'");
}

std::string ConfigMap::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        fail(ErrorCode::Config, source_ + ": missing required key '" + key + "'");
    }
    return it->second;
}

std::string ConfigMap::get_string_or(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key) const {
    const std::string raw = get_string(key);
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) bad_value(key, "a number");
        return v;
    } catch (const std::logic_error&) {
        bad_value(key, "a number");
    }
}

double ConfigMap::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::size_t ConfigMap::get_size(const std::string& key) const {
    const std::string raw = get_string(key);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
        bad_value(key, "a non-negative integer");
    }
    return v;
}

std::size_t ConfigMap::get_size_or(const std::string& key, std::size_t fallback) const {
    return has(key) ? get_size(key) : fallback;
}

std::uint64_t ConfigMap::get_uint64_or(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string raw = get_string(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
        bad_value(key, "a non-negative integer");
    }
    return v;
}

bool ConfigMap::get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string raw = lower(get_string(key));
    if (raw == "true" || raw == "yes" || raw == "1") return true;
    if (raw == "false" || raw == "no" || raw == "0") return false;
    bad_value(key, "a boolean");
}

std::vector<std::string> ConfigMap::get_list(const std::string& key) const {
    const std::string raw = get_string(key);
    std::vector<std::string> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) bad_value(key, "a non-empty comma-separated list");
    return out;
}

std::vector<std::string> ConfigMap::get_list_or(const std::string& key,
                                                const std::vector<std::string>& fallback) const {
    return has(key) ? get_list(key) : fallback;
}

std::vector<double> ConfigMap::get_double_list_or(const std::string& key,
                                                  const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const std::string& item : get_list(key)) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) bad_value(key, "a list of numbers");
            out.push_back(v);
        } catch (const std::logic_error&) {
            bad_value(key, "a list of numbers");
        }
    }
    return out;
}

void ConfigMap::check_keys(const std::set<std::string>& known,
                           const std::vector<std::string>& known_prefixes) const {
    for (const auto& [key, value] : values_) {
        if (known.count(key)) continue;
        const bool prefixed = std::any_of(
            known_prefixes.begin(), known_prefixes.end(),
            [&](const std::string& p) { return key.rfind(p, 0) == 0; });
        if (!prefixed) {
            fail(ErrorCode::Config, source_ + ": unknown key '" + key + "'");
        }
    }
}

}  // namespace survkit
