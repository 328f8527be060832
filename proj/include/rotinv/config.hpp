#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "rotinv/errors.hpp"

namespace rotinv {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace detail

/// Flat key=value configuration with [section] headers and # comments.
/// Keys are addressed as "section.key"; keys before any header have no
/// section prefix.
class Config {
  public:
    Config() = default;

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw MissingFile(path);
        Config cfg;
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string t = detail::trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']') throw MalformedRow(line_no, "unterminated section header");
                section = detail::trim(t.substr(1, t.size() - 2));
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) throw MalformedRow(line_no, "expected key = value");
            const std::string key = detail::trim(t.substr(0, eq));
            const std::string value = detail::trim(t.substr(eq + 1));
            if (key.empty()) throw MalformedRow(line_no, "empty key");
            cfg.set(section.empty() ? key : section + "." + key, value);
        }
        return cfg;
    }

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_str(const std::string& key, const std::string& fallback = "") const {
        const auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (...) {
            throw InvalidIndex("config: " + key + " is not a number: " + it->second);
        }
    }

    int get_int(const std::string& key, int fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            return std::stoi(it->second);
        } catch (...) {
            throw InvalidIndex("config: " + key + " is not an integer: " + it->second);
        }
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            return std::stoull(it->second);
        } catch (...) {
            throw InvalidIndex("config: " + key + " is not an integer: " + it->second);
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        const std::string& v = it->second;
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw InvalidIndex("config: " + key + " is not a boolean: " + v);
    }

    /// Comma-separated list of doubles.
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const std::string t = detail::trim(tok);
            if (t.empty()) continue;
            try {
                out.push_back(std::stod(t));
            } catch (...) {
                throw InvalidIndex("config: " + key + " has a non-numeric entry: " + t);
            }
        }
        return out;
    }

    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const {
        const auto doubles = get_double_list(key, {});
        if (doubles.empty() && !has(key)) return fallback;
        std::vector<int> out;
        for (double v : doubles) out.push_back(static_cast<int>(v));
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace rotinv
