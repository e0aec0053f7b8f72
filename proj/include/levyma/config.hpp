#ifndef LEVYMA_CONFIG_HPP
#define LEVYMA_CONFIG_HPP

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace levyma {

// Structured text config: `[section]` headers followed by `key=value`
// entries (several may share a line).  Values are bare numbers, booleans,
// double-quoted strings, or comma-separated number lists.
class Config {
public:
    Config() = default;

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    static Config parse(const std::string& text, const std::string& origin = "<string>") {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && std::isspace(unsigned(line[i]))) ++i;
                if (i >= line.size()) break;
                if (line[i] == '[') {
                    std::size_t close = line.find(']', i);
                    if (close == std::string::npos)
                        fail(origin, lineno, "unterminated section header");
                    section = line.substr(i + 1, close - i - 1);
                    i = close + 1;
                    continue;
                }
                std::size_t eq = line.find('=', i);
                if (eq == std::string::npos)
                    fail(origin, lineno, "expected key=value near '" + line.substr(i) + "'");
                std::string key = trim(line.substr(i, eq - i));
                if (key.empty()) fail(origin, lineno, "empty key");
                i = eq + 1;
                while (i < line.size() && std::isspace(unsigned(line[i]))) ++i;
                std::string value;
                if (i < line.size() && line[i] == '"') {
                    std::size_t close = line.find('"', i + 1);
                    if (close == std::string::npos)
                        fail(origin, lineno, "unterminated string for key '" + key + "'");
                    value = line.substr(i + 1, close - i - 1);
                    i = close + 1;
                } else {
                    std::size_t end = i;
                    while (end < line.size() && !std::isspace(unsigned(line[end]))) ++end;
                    value = line.substr(i, end - i);
                    i = end;
                }
                if (value.empty()) fail(origin, lineno, "empty value for key '" + key + "'");
                cfg.entries_[section + "." + key] = value;
            }
        }
        return cfg;
    }

    bool has(const std::string& dotted_key) const {
        return entries_.count(dotted_key) != 0;
    }

    std::string get_string(const std::string& key) const { return raw(key); }

    std::string get_string(const std::string& key, const std::string& dflt) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? dflt : it->second;
    }

    double get_double(const std::string& key) const { return to_double(key, raw(key)); }

    double get_double(const std::string& key, double dflt) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? dflt : to_double(key, it->second);
    }

    long long get_int(const std::string& key) const { return to_int(key, raw(key)); }

    long long get_int(const std::string& key, long long dflt) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? dflt : to_int(key, it->second);
    }

    bool get_bool(const std::string& key, bool dflt) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        if (it->second == "true") return true;
        if (it->second == "false") return false;
        throw config_error("key '" + key + "': expected true/false, got '" + it->second + "'");
    }

    std::vector<double> get_doubles(const std::string& key) const {
        std::vector<double> out;
        std::string s = raw(key);
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(to_double(key, trim(item)));
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return entries_; }

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

private:
    std::map<std::string, std::string> entries_;

    const std::string& raw(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw config_error("missing config key '" + key + "'");
        return it->second;
    }

    static double to_double(const std::string& key, const std::string& v) {
        char* end = nullptr;
        double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0')
            throw config_error("key '" + key + "': not a number: '" + v + "'");
        return x;
    }

    static long long to_int(const std::string& key, const std::string& v) {
        char* end = nullptr;
        long long x = std::strtoll(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0')
            throw config_error("key '" + key + "': not an integer: '" + v + "'");
        return x;
    }

    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(unsigned(s[a]))) ++a;
        while (b > a && std::isspace(unsigned(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    [[noreturn]] static void fail(const std::string& origin, int lineno,
                                  const std::string& msg) {
        throw config_error(origin + ":" + std::to_string(lineno) + ": " + msg);
    }
};

}  // namespace levyma

#endif
