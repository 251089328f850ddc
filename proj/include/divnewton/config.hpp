#pragma once
/**
 * Experiment configuration: a flat "key = value" text file.
 *
 *   format_version = 1
 *   function = Rosenbrock-wide-saddle      # preset name, or "eigen"
 *   strategy = Szzp-Mlm-Ctau
 *   starts = -1,0.25; -10,0                # or "fixture"
 *   seed = 7
 *   window = -2,2,-1,3
 *   resolution = 400,400
 *   entry_threshold = 1e-3                 # any ZigzagConfig field
 *
 * Blank lines and text after '#' are ignored. Unknown keys are errors.
 */

#include "divnewton/fixtures.hpp"
#include "divnewton/line_search.hpp"
#include "divnewton/records.hpp"
#include "divnewton/test_functions.hpp"

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <string>
#include <vector>

namespace divnewton {

inline constexpr int kConfigFormatVersion = 1;

struct ExperimentConfig {
    std::string function = "Rosenbrock-wide";
    Strategy strategy = Strategy::zigzag_parallel;
    /// Empty means the documented fixture set for the function.
    std::vector<Point> starts;
    std::uint64_t seed = 1;
    std::optional<Window> window;
    int nx = 400;
    int ny = 400;
    int workers = 1;
    /// eigen experiment
    int dimension = 10;
    int runs = 10;
    ZigzagConfig zigzag;
    std::string output;

    bool is_eigen() const { return function == "eigen"; }

    void validate() const {
        if (!is_eigen()) {
            require_preset(function);
        }
        zigzag.validate();
        if (nx < 2 || ny < 2) {
            throw std::invalid_argument("resolution must be at least 2 x 2");
        }
        if (workers < 1) {
            throw std::invalid_argument("workers must be >= 1");
        }
        if (is_eigen() && (dimension < 2 || runs < 1)) {
            throw std::invalid_argument("eigen experiment needs n >= 2 and runs >= 1");
        }
        if (window && !(window->xmin < window->xmax && window->ymin < window->ymax)) {
            throw std::invalid_argument("window must satisfy xmin < xmax and ymin < ymax");
        }
    }

    Window scan_window() const { return window ? *window : require_preset(function).window; }

    std::vector<Point> start_points() const { return starts.empty() ? fixture_starts(function) : starts; }
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline Window parse_window(const std::string& s) {
    const Point p = parse_point(s);
    if (p.size() != 4) {
        throw FormatError("window needs four values xmin,xmax,ymin,ymax");
    }
    return {p(0), p(1), p(2), p(3)};
}

inline std::pair<int, int> parse_resolution(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() == 1) {
        const int n = std::stoi(parts[0]);
        return {n, n};
    }
    if (parts.size() == 2) {
        return {std::stoi(parts[0]), std::stoi(parts[1])};
    }
    throw FormatError("resolution needs one or two integers");
}

inline bool parse_bool(const std::string& s) {
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    throw FormatError("malformed boolean '" + s + "'");
}

/// Applies one key to the config; throws FormatError on unknown keys or bad values.
inline void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
    ZigzagConfig& z = c.zigzag;
    try {
        if (key == "function") c.function = value;
        else if (key == "strategy") c.strategy = parse_strategy(value);
        else if (key == "starts") {
            std::string compact;
            for (char ch : value) {
                if (ch != ' ' && ch != '\t') compact += ch;
            }
            c.starts = compact == "fixture" ? std::vector<Point>{} : parse_point_list(compact);
        }
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "window") c.window = parse_window(value);
        else if (key == "resolution") std::tie(c.nx, c.ny) = parse_resolution(value);
        else if (key == "workers") c.workers = std::stoi(value);
        else if (key == "n") c.dimension = std::stoi(value);
        else if (key == "runs") c.runs = std::stoi(value);
        else if (key == "output") c.output = value;
        else if (key == "entry_threshold") z.entry_threshold = parse_double(value);
        else if (key == "escape_threshold") z.escape_threshold = parse_double(value);
        else if (key == "parallelity_angle") z.parallelity_angle = parse_double(value);
        else if (key == "explicit_steps") z.explicit_steps = std::stoi(value);
        else if (key == "golden_bracket") z.golden_bracket = parse_double(value);
        else if (key == "golden_max_steps") z.golden_max_steps = std::stoi(value);
        else if (key == "golden_tolerance") z.golden_tolerance = parse_double(value);
        else if (key == "refine_alpha_limit") z.refine_alpha_limit = parse_double(value);
        else if (key == "parallelity_enabled") z.parallelity_enabled = parse_bool(value);
        else throw FormatError("unknown key '" + key + "'");
    } catch (const std::logic_error& e) {
        // std::stoi and friends, parse_strategy
        throw FormatError("bad value for '" + key + "': " + e.what());
    }
}

inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string line;
    int lineno = 0;
    std::optional<int> version;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "format_version") {
                version = std::stoi(value);
            } else {
                apply_setting(c, key, value);
            }
        } catch (const std::exception& e) {
            throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!version) {
        throw FormatError("config lacks format_version");
    }
    if (*version != kConfigFormatVersion) {
        throw FormatError("unsupported format_version " + std::to_string(*version));
    }
    return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config '" + path + "'");
    }
    return parse_config(in);
}

}  // namespace divnewton
