// SPDX-License-Identifier: Apache-2.0

#ifndef MMBEAM_CLI_HPP
#define MMBEAM_CLI_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "mmbeam/experiments.hpp"

namespace mmbeam {

inline constexpr const char *kVersion = "0.1.0";

// Parsed command line: one base experiment config plus the value lists the
// sweep subcommands expand into per-curve configs.
struct CliConfig {
    std::string subcommand;
    SimConfig base;
    std::vector<std::size_t> n_s_values = {1, 2, 3};
    std::vector<std::size_t> k_values = {2};
    std::vector<int> i_ly_values = {2};
    std::vector<std::size_t> antenna_grid = {8, 16, 32, 64, 128}; // timeslots sweep
    std::size_t codebook_n = 32;                                  // codebook dump size
    std::size_t pattern_points = 512;
    std::size_t threads = 0; // 0 = machine parallelism
    std::string out_dir = ".";
};

// Parses flags (and an optional --config key=value file; flags win).
// Throws ValidationError with every violated constraint listed.
CliConfig parse_config(const std::vector<std::string> &args);

// Expands the sweep lists into concrete experiment configs.
std::vector<SimConfig> expand_configs(const CliConfig &cli);

// Runs the chosen subcommand, writing outputs under out_dir. Returns 0 on
// success; standard output is reserved for `demo`.
int dispatch(const CliConfig &cli);

// argv entry point: parse + dispatch with usage/validation errors mapped to
// nonzero exit codes.
int run_cli(int argc, char **argv);

} // namespace mmbeam

#endif
