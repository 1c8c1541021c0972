#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "debond/types.hpp"

namespace debond {

/// Parsed and validated run configuration (TOML-style sections).
struct RunConfig {
    // [geometry]
    int dimension = 1;
    std::vector<double> lengths = {1.0};
    std::vector<int> nodes = {401};
    std::string gamma_side = "left";
    double gamma_lo = 0.0;
    double gamma_hi = -1.0;
    double a0_depth = 0.2;
    double a0_offset = 0.0;

    // [density]
    std::string family = "exp";
    double kappa_inf = 1.0;
    double rate = 1.0;

    // [loading]
    std::vector<double> lambda_times = {0.0, 1.0};
    std::vector<double> lambda_values = {0.0, 1.0};
    double g_width = 0.1;

    // [time]
    int steps = 200;
    std::vector<double> partition;  // optional explicit grid

    // [solver]
    double pcg_rtol = 1e-10;
    double pcg_atol = 1e-9;
    double sweep_tol = 1e-12;
    int sweep_cap = 500;
    bool restarts = true;
    bool majorization = true;
    double positivity_tol = -1.0;  // sentinel: 1e-12 * ceiling
    std::uint64_t seed = 0;

    // [cohesive]
    double eps = 0.05;

    // [study]
    std::vector<double> eps_list = {0.1, 0.05, 0.025, 0.0125};
    double delta_exponent = 0.5;
    bool delta_sensitivity = false;

    // [oracle]
    int oracle_instances = 20;
    int oracle_levels = 51;
    std::vector<double> oracle_eps = {0.5, 0.1};

    // [audit]
    int checkpoints = 10;

    // [output]
    std::string out_dir = "out";
    std::vector<double> snapshot_times;
    bool plots = true;

    std::string raw_text;
};

/// Parses TOML-style key/value text into a validated RunConfig. Throws
/// ConfigError carrying every parse diagnostic (with line numbers) and every
/// violated semantic rule, not just the first.
RunConfig parse_config(const std::string& text);

/// Convenience: read a file and parse it. Throws IoError / ConfigError.
RunConfig parse_config_file(const std::string& path);

}  // namespace debond
