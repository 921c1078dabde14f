#pragma once

// Flat key = value config files: '#' comments, dotted keys, scalars, comma
// vectors and semicolon-row matrices. Relative paths resolve against the
// config file's directory.

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace slsctl {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class Config {
  public:
    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        Config cfg;
        cfg.dir_ = std::filesystem::absolute(path).parent_path();
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto eq = line.find('=');
            if (eq == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos)
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      " is not key = value");
                continue;
            }
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError("empty key on line " + std::to_string(lineno));
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing config key: " + key);
        return it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key) const { return parse_double(key, get_string(key)); }

    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    int get_int(const std::string& key) const {
        double v = get_double(key);
        int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) throw ConfigError("expected integer for " + key);
        return i;
    }

    int get_int(const std::string& key, int fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    Eigen::VectorXd get_vector(const std::string& key) const {
        auto cells = split(get_string(key), ',');
        Eigen::VectorXd v(static_cast<int>(cells.size()));
        for (size_t i = 0; i < cells.size(); ++i)
            v(static_cast<int>(i)) = parse_double(key, cells[i]);
        return v;
    }

    Eigen::MatrixXd get_matrix(const std::string& key) const {
        auto rows = split(get_string(key), ';');
        if (rows.empty()) throw ConfigError("empty matrix for " + key);
        std::vector<std::vector<std::string>> cells;
        for (const auto& r : rows) cells.push_back(split(r, ','));
        const size_t cols = cells.front().size();
        Eigen::MatrixXd m(static_cast<int>(rows.size()), static_cast<int>(cols));
        for (size_t r = 0; r < cells.size(); ++r) {
            if (cells[r].size() != cols) throw ConfigError("ragged matrix for " + key);
            for (size_t c = 0; c < cols; ++c)
                m(static_cast<int>(r), static_cast<int>(c)) = parse_double(key, cells[r][c]);
        }
        return m;
    }

    /// Path value resolved against the config file's directory.
    std::string get_path(const std::string& key) const {
        std::filesystem::path p = get_string(key);
        if (p.is_absolute()) return p.string();
        return (dir_ / p).string();
    }

    /// FNV-1a hash of the parsed key/value pairs, for the artifact manifest.
    std::string hash() const {
        unsigned long long h = 1469598103934665603ull;
        auto mix = [&h](const std::string& s) {
            for (unsigned char c : s) {
                h ^= c;
                h *= 1099511628211ull;
            }
        };
        for (const auto& [k, v] : values_) {
            mix(k);
            mix("=");
            mix(v);
            mix("\n");
        }
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", h);
        return buf;
    }

  private:
    static std::string trim(const std::string& s) {
        auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    static std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
        return out;
    }

    static double parse_double(const std::string& key, const std::string& text) {
        try {
            size_t pos = 0;
            double v = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + text + "' for key " + key);
        }
    }

    std::map<std::string, std::string> values_;
    std::filesystem::path dir_;
};

}  // namespace slsctl
