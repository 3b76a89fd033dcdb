#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "transmask/errors.hpp"

namespace transmask {

/// Ordered `key=value` text record. Keys may repeat (list entries); blank
/// lines and lines starting with '#' are ignored on parse. Serialization is
/// byte-stable: entries are written in insertion order, one per line.
class Manifest {
public:
    void set(std::string key, std::string value) {
        for (auto& [k, v] : entries_) {
            if (k == key) {
                v = std::move(value);
                return;
            }
        }
        add(std::move(key), std::move(value));
    }

    void add(std::string key, std::string value) {
        if (key.empty() || key.find_first_of("=\n") != std::string::npos ||
            value.find('\n') != std::string::npos) {
            throw FormatError("manifest entries must be single-line key=value, bad key '" + key + "'");
        }
        entries_.emplace_back(std::move(key), std::move(value));
    }

    void set(std::string key, const char* value) { set(std::move(key), std::string(value)); }
    void set(std::string key, double value) { set(std::move(key), format_double(value)); }
    void set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }
    void set(std::string key, std::uint64_t value) { set(std::move(key), std::to_string(value)); }

    std::optional<std::string> find(std::string_view key) const {
        for (const auto& [k, v] : entries_) {
            if (k == key) {
                return v;
            }
        }
        return std::nullopt;
    }

    std::string get(std::string_view key) const {
        auto v = find(key);
        if (!v) {
            throw FormatError("manifest is missing key '" + std::string(key) + "'");
        }
        return *v;
    }

    double get_double(std::string_view key) const {
        const std::string v = get(key);
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) {
                throw std::invalid_argument(v);
            }
            return d;
        } catch (const std::exception&) {
            throw FormatError("manifest key '" + std::string(key) + "' is not a number: " + v);
        }
    }

    std::uint64_t get_uint(std::string_view key) const {
        const std::string v = get(key);
        try {
            std::size_t used = 0;
            const auto n = std::stoull(v, &used);
            if (used != v.size() || v.front() == '-') {
                throw std::invalid_argument(v);
            }
            return n;
        } catch (const std::exception&) {
            throw FormatError("manifest key '" + std::string(key) + "' is not an unsigned integer: " + v);
        }
    }

    bool get_bool(std::string_view key) const {
        const std::string v = get(key);
        if (v == "true") return true;
        if (v == "false") return false;
        throw FormatError("manifest key '" + std::string(key) + "' is not a boolean: " + v);
    }

    std::vector<std::string> all(std::string_view key) const {
        std::vector<std::string> out;
        for (const auto& [k, v] : entries_) {
            if (k == key) {
                out.push_back(v);
            }
        }
        return out;
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

    std::string serialize() const {
        std::string out;
        for (const auto& [k, v] : entries_) {
            out += k;
            out += '=';
            out += v;
            out += '\n';
        }
        return out;
    }

    static Manifest parse(std::string_view text) {
        Manifest m;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(pos, end - pos);
            ++line_no;
            pos = end + 1;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string_view::npos || line[first] == '#') {
                if (end == text.size()) break;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                throw FormatError("manifest line " + std::to_string(line_no) + " is not key=value");
            }
            m.entries_.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
            if (end == text.size()) break;
        }
        return m;
    }

    /// Shortest decimal form that parses back to the same double.
    static std::string format_double(double v) {
        char buf[64];
        for (int precision = 6; precision <= 17; ++precision) {
            std::snprintf(buf, sizeof buf, "%.*g", precision, v);
            if (std::stod(buf) == v) {
                break;
            }
        }
        return buf;
    }

private:
    static std::string trim(std::string_view s) {
        const auto b = s.find_first_not_of(" \t");
        if (b == std::string_view::npos) return {};
        const auto e = s.find_last_not_of(" \t");
        return std::string(s.substr(b, e - b + 1));
    }

    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace transmask
