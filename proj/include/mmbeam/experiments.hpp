// SPDX-License-Identifier: Apache-2.0

#ifndef MMBEAM_EXPERIMENTS_HPP
#define MMBEAM_EXPERIMENTS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mmbeam/channel.hpp"
#include "mmbeam/search.hpp"

namespace mmbeam {

// Parameters of one Monte Carlo experiment point (fixed system, SNR grid).
struct SimConfig {
    std::size_t n_a = 32;           // BS antennas
    std::size_t m_a = 32;           // MS antennas
    std::size_t n_r = 3;            // BS RF chains
    std::size_t m_r = 3;            // MS RF chains
    std::size_t n_s = 2;            // streams / beams to find
    std::size_t l = 4;              // multipath components
    std::size_t m = 2;              // hierarchical factor
    std::size_t k = 2;              // over-sampling factor
    int i_ly = 2;                   // initial search layer
    std::vector<double> snr_db_grid = {0, 5, 10, 15, 20, 25, 30};
    std::size_t trials = 1000;
    std::uint64_t master_seed = 1;
    bool noiseless_estimation = true; // rate pipeline: noiseless search + estimation
    double training_snr_db = 60.0;    // used only when noiseless_estimation is false
};

// Empty when valid, otherwise one message per violated constraint.
std::vector<std::string> validate(const SimConfig &cfg);

struct TrialRecord {
    std::size_t trial_index;
    double snr_db;
    bool success;
    std::size_t n_found;
    double rate_lc_hpc;
    double rate_bound;
    std::int64_t measurements_used;
};

// Maps found over-sampling pairs back to angles and greedily matches them
// one-to-one against the true paths at the permitted-error tolerances
// (1/N_A on AoD, 1/M_A on AoA). True only when all n_s beams matched.
bool success_decision(const BeamSearchResult &result, const ChannelRealization &truth,
                      std::size_t k_oversample, std::size_t n_s);

// Training time-slot counts with N_R*M_R parallel measurements per slot.
std::int64_t time_cost_hierarchical(const SimConfig &cfg);
std::int64_t time_cost_sequential(const SimConfig &cfg);
double time_cost_sparse(const SimConfig &cfg); // comparison scheme, real-valued

struct SuccessRow {
    double snr_db;
    std::size_t n_s;
    std::size_t k;
    int i_ly;
    double success_rate;
    double ci95_halfwidth;
    std::size_t trials;
};

struct RateRow {
    double snr_db;
    std::size_t n_s;
    std::size_t k;
    int i_ly;
    double rate_lc_hpc_mean;
    double rate_lc_hpc_ci95;
    double rate_bound_mean;
    double rate_bound_ci95;
    std::size_t trials;
};

// Success rate per SNR grid point, averaged over `trials` independent
// channel/noise realizations. threads = 0 picks the machine parallelism;
// results are identical for every thread count.
std::vector<SuccessRow> run_success_sweep(const SimConfig &cfg, std::size_t threads = 0);

// Mean LC-HPC achievable rate and rate bound per SNR grid point.
std::vector<RateRow> run_rate_sweep(const SimConfig &cfg, std::size_t threads = 0);

// CSV with stable documented headers (see README).
std::string success_csv(const std::vector<SuccessRow> &rows);
std::string rate_csv(const std::vector<RateRow> &rows);

} // namespace mmbeam

#endif
