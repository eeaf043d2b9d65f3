#pragma once

#include "heatwave/mesh.hpp"
#include "heatwave/report.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace heatwave {

/// Every tunable of every experiment. Optional fields fall back to the
/// experiment's own default when unset; the echo in reports records the
/// value actually used.
struct RunConfig {
    std::string experiment;

    // mesh
    std::vector<int> n;               // refinement ladder (mesh: first entry)
    std::string out = "mesh.txt";     // mesh subcommand output file

    // time
    double T = 1.0;
    std::vector<int> m;               // slab counts per level; empty: M = n
    std::string partition = "uniform";
    double ratio = 1.2;
    double beta = 1.0;
    int q = 1;

    // space
    int r = 1;

    // weight and singular data
    std::optional<Point2> x0;
    double K = 4.0;
    std::vector<double> k_list{1.0, 4.0, 16.0};
    std::string direction = "x";
    double t_tilde = 0.55;            // fraction of T

    // sector
    double gamma = 0.7853981633974483;
    std::vector<double> rays;         // empty: 3 pi/4 and pi
    std::vector<double> radii;        // empty: 12 log-spaced in [1e-1, 1e4]
    std::vector<std::string> norms;   // empty: experiment default

    // solver
    double tol = 1e-8;
    int max_iter = 500;
    std::string eig_method = "lanczos";
    std::string block_solve = "diagonalized";

    // study
    std::string solution;             // smooth | discrete | kink
    std::string mode = "ladder";      // conv: ladder | k_only
    std::string forcing;              // maxreg: smooth | delta
    double d = 0.36;
    Point2 kink_center{0.890625, 0.890625};
    double kink_amplitude = 10.0;
    int fine_levels = 2;
    int samples = 100;
    std::uint64_t seed = 1;
    long count = 100000;

    // acceptance windows
    double window_tight = 0.25;
    double window_mid = 0.35;
    double window_loose = 0.5;
    double window_const = 0.1;

    // output
    std::string output_dir = "out";
};

/// Field table entry: config key (snake_case; the flag is --kebab-case), section and help text.
struct ConfigField {
    std::string key;
    std::string section;
    std::string help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<Json(const RunConfig&)> get;
};

const std::vector<ConfigField>& config_fields();

std::string kebab(const std::string& key);

/// Parses `key = value` lines with optional [section] headers. '#' starts a
/// comment. A key must belong to the section it appears in (or appear before
/// any section header). Throws ParseError naming the line.
void apply_config_text(RunConfig& cfg, const std::string& text);
/// Throws Error naming the path when it cannot be read.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
/// Sets one field from text; throws ValidationError for unknown keys or bad values.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// All fields with their effective values.
Json echo(const RunConfig& cfg);

} // namespace heatwave
