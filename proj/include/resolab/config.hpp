#pragma once

#include "resolab/potentials.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace resolab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key-value run configuration with [section] headers; unknown keys are
// rejected so typos fail loudly.
struct RunConfig {
    // [potential]
    std::string kind = "gaussian";  // gaussian | mixture | square-barrier | zero
    int n = 1;
    double amplitude = 1.0;
    double width = 1.0;
    std::vector<double> center;           // length n (gaussian)
    std::vector<GaussianBump> bumps;      // mixture
    double height = 1.0, barrier_width = 1.0;

    // [testfn]
    double t0 = 1.0;
    double T = 3.0;
    int order = 24;  // highest f-derivative carried

    // [sweep]
    std::vector<double> h_list;       // strictly decreasing
    std::vector<double> lambda_list;  // strictly increasing

    // [window]
    double window_re = 20.0;
    double window_depth = 3.0;

    // [run]
    double h = 1.0;
    int k_min = 0;  // 0: default to n
    int k_max = 0;  // 0: default to n + 12 (extraction) / 40 (pipeline)
    int grid_nodes = 200;
    double ode_tol = 1e-12;
    double quad_tol = 1e-10;
    unsigned seed = 12345;
    std::string out_dir = "out";
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);  // for round-trip tests
std::string render_config(const RunConfig& config);

// Throws ConfigError naming the offending field.
void validate(const RunConfig& config);

// Instantiate the potential described by the config.
PotentialField make_field(const RunConfig& config);

}  // namespace resolab
