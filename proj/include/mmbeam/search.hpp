// SPDX-License-Identifier: Apache-2.0

#ifndef MMBEAM_SEARCH_HPP
#define MMBEAM_SEARCH_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mmbeam/channel.hpp"
#include "mmbeam/codebook.hpp"
#include "mmbeam/linalg.hpp"
#include "mmbeam/rng.hpp"

namespace mmbeam {

// Outcome of a multi-beam search: the over-sampling-layer index pairs of the
// found paths, their measured complex gains, and the accumulated found
// channel (sum of the rank-1 contributions, including the sqrt(power)
// factor folded into the gains).
struct BeamSearchResult {
    std::vector<std::pair<int, int>> pairs; // (I_ms, J_bs), 1-based
    std::vector<cd> gains;                  // beta per pair
    ComplexMatrix found_channel;            // M_A x N_A
    std::int64_t measurements_used = 0;
    bool duplicate_found = false; // an iteration re-found an existing pair
};

// Per-stage record for the demo trace.
struct SearchStageStep {
    int path_index;           // 1-based search iteration
    std::string stage;        // "initial", "refine-ms", "refine-bs", "high-res"
    int layer;                // codebook layer tested (kOversampleLayer for high-res)
    std::vector<int> ms_positions;
    std::vector<int> bs_positions;
    std::vector<double> magnitudes; // |y| per tested pair, row-major over (ms, bs)
    int winner_ms;
    int winner_bs;
};

using SearchTrace = std::vector<SearchStageStep>;

// Brute-force scan of the full K*M_A x K*N_A over-sampled angle grid, then
// greedy peak picking with a (2K-1)^2 exclusion neighborhood per peak.
BeamSearchResult sequential_search(const ChannelRealization &h, std::size_t k_oversample,
                                   std::size_t n_s, double power, Rng &rng, bool noiseless);

// measure() minus the computed contribution of the already-found channel.
cd subtracted_measure(const ChannelRealization &h, std::span<const cd> w_ms,
                      std::span<const cd> w_bs, const ComplexMatrix &found, double power,
                      Rng &rng, bool noiseless);

// Layered multi-beam search: exhaustive pair search on layer i_ly, two-sided
// child refinement down to the basis layer, then a K x K high-resolution
// scan on the over-sampling layer; one path per iteration, with found paths
// subtracted from every later measurement.
BeamSearchResult hierarchical_search(const ChannelRealization &h, const Codebook &cb_bs,
                                     const Codebook &cb_ms, std::size_t n_s, int i_ly,
                                     double power, Rng &rng, bool noiseless,
                                     SearchTrace *trace = nullptr);

} // namespace mmbeam

#endif
