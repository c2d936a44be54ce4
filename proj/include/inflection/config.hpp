#pragma once

#include "inflection/evolve.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace inflection::cli {

struct RunConfig {
    int mode_j = 1;
    int n_expansion = 2;
    double t_start = -6.0;
    double t_end = 6.0;
    double dx = 0.01;
    double dt = 5e-4;
    double x_max = 0.0;  // resolved by parse_config; 0 in the file means auto
    bool x_max_auto = true;
    double eta_margin = evolve::kDefaultEtaMargin;
    std::vector<double> snapshot_times;    // default: integers in [max(1, t_end-4), t_end]
    std::vector<double> extraction_times;  // default: t_end-3, ..., t_end
    std::filesystem::path output_dir = "out";
    double tail_tol = evolve::kDefaultTailTol;
    std::vector<int> j_list{1, 2, 3};  // scatter only

    evolve::RunParams run_params() const;
};

// `key = value` lines, `#` starts a comment. Lists are comma separated.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

// Fills defaults that depend on other keys and checks invariants.
void finalize(RunConfig& cfg);

// Key reference with defaults, for --help.
std::string config_reference();

}  // namespace inflection::cli
