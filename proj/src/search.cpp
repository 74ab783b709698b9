// SPDX-License-Identifier: Apache-2.0

#include "mmbeam/search.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmbeam/errors.hpp"

namespace mmbeam {

namespace {

double oversample_angle(int index, std::size_t k_oversample, std::size_t n_antennas) {
    return -1.0 + (2.0 * index - 1.0) / static_cast<double>(k_oversample * n_antennas);
}

// Appends (pair, gain) to the result, merging into an existing entry when the
// pair was already found so the pair list stays distinct while found_channel
// keeps the full accumulated contribution.
void record_path(BeamSearchResult &result, std::pair<int, int> pair, cd beta,
                 const std::vector<cd> &g_ms, const std::vector<cd> &g_bs) {
    auto it = std::find(result.pairs.begin(), result.pairs.end(), pair);
    if (it == result.pairs.end()) {
        result.pairs.push_back(pair);
        result.gains.push_back(beta);
    } else {
        result.gains[static_cast<std::size_t>(it - result.pairs.begin())] += beta;
        result.duplicate_found = true;
    }
    result.found_channel = result.found_channel + outer_product(g_ms, g_bs) * beta;
}

} // namespace

cd subtracted_measure(const ChannelRealization &h, std::span<const cd> w_ms,
                      std::span<const cd> w_bs, const ComplexMatrix &found, double power,
                      Rng &rng, bool noiseless) {
    if (found.rows() != h.n_ms_antennas || found.cols() != h.n_bs_antennas)
        throw ContractViolation("subtracted_measure: found-channel dimensions must match H");
    return measure(h, w_ms, w_bs, power, rng, noiseless) - quadratic_form(w_ms, found, w_bs);
}

BeamSearchResult sequential_search(const ChannelRealization &h, std::size_t k_oversample,
                                   std::size_t n_s, double power, Rng &rng, bool noiseless) {
    if (n_s < 1)
        throw ContractViolation("sequential_search: need n_s >= 1");
    if (k_oversample < 1)
        throw ContractViolation("sequential_search: over-sampling factor must be >= 1");

    const std::size_t rows = k_oversample * h.n_ms_antennas;
    const std::size_t cols = k_oversample * h.n_bs_antennas;

    std::vector<std::vector<cd>> ms_beams(rows), bs_beams(cols);
    for (std::size_t i = 0; i < rows; ++i)
        ms_beams[i] = steering_vector(
            h.n_ms_antennas, oversample_angle(static_cast<int>(i) + 1, k_oversample,
                                              h.n_ms_antennas));
    for (std::size_t j = 0; j < cols; ++j)
        bs_beams[j] = steering_vector(
            h.n_bs_antennas, oversample_angle(static_cast<int>(j) + 1, k_oversample,
                                              h.n_bs_antennas));

    ComplexMatrix grid(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            grid(i, j) = measure(h, ms_beams[i], bs_beams[j], power, rng, noiseless);

    BeamSearchResult result;
    result.found_channel = ComplexMatrix(h.n_ms_antennas, h.n_bs_antennas);
    result.measurements_used = static_cast<std::int64_t>(rows * cols);

    std::vector<char> excluded(rows * cols, 0);
    const int radius = static_cast<int>(k_oversample) - 1;
    for (std::size_t found = 0; found < n_s; ++found) {
        double best = -1.0;
        std::size_t bi = 0, bj = 0;
        bool any = false;
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                if (excluded[i * cols + j])
                    continue;
                const double mag = std::abs(grid(i, j));
                if (mag > best) {
                    best = mag;
                    bi = i;
                    bj = j;
                    any = true;
                }
            }
        }
        if (!any)
            break; // exclusion zones consumed the grid
        // keep one physical path from occupying two slots: block the
        // surrounding (2K-1) x (2K-1) cells before picking the next peak;
        // the grid wraps since the angle domain is a circle of length 2
        for (int di = -radius; di <= radius; ++di) {
            for (int dj = -radius; dj <= radius; ++dj) {
                const int ii =
                    (static_cast<int>(bi) + di + static_cast<int>(rows)) % static_cast<int>(rows);
                const int jj =
                    (static_cast<int>(bj) + dj + static_cast<int>(cols)) % static_cast<int>(cols);
                excluded[static_cast<std::size_t>(ii) * cols + static_cast<std::size_t>(jj)] = 1;
            }
        }
        record_path(result, {static_cast<int>(bi) + 1, static_cast<int>(bj) + 1}, grid(bi, bj),
                    ms_beams[bi], bs_beams[bj]);
    }
    return result;
}

namespace {

struct SideState {
    const Codebook *cb;
    int layer;    // current layer of the held codeword
    int position; // 1-based within that layer
};

} // namespace

BeamSearchResult hierarchical_search(const ChannelRealization &h, const Codebook &cb_bs,
                                     const Codebook &cb_ms, std::size_t n_s, int i_ly,
                                     double power, Rng &rng, bool noiseless,
                                     SearchTrace *trace) {
    if (n_s < 1)
        throw ContractViolation("hierarchical_search: need n_s >= 1");
    if (cb_bs.n_antennas != h.n_bs_antennas || cb_ms.n_antennas != h.n_ms_antennas)
        throw ContractViolation("hierarchical_search: codebook sizes must match the channel");
    if (cb_bs.oversample_factor != cb_ms.oversample_factor)
        throw ContractViolation("hierarchical_search: BS/MS over-sampling factors must agree");
    const int s_bs = static_cast<int>(cb_bs.depth);
    const int s_ms = static_cast<int>(cb_ms.depth);
    if (i_ly < 1 || i_ly > s_bs || i_ly > s_ms)
        throw ContractViolation("hierarchical_search: initial layer " + std::to_string(i_ly) +
                                " must be in [1, min(S_bs, S_ms)]");

    const std::size_t k_over = cb_bs.oversample_factor;
    const int m_factor = static_cast<int>(cb_bs.hierarchical_factor);
    const int s_max = std::max(s_bs, s_ms);

    BeamSearchResult result;
    result.found_channel = ComplexMatrix(h.n_ms_antennas, h.n_bs_antennas);

    auto probe = [&](const Codeword &w_ms, const Codeword &w_bs) {
        ++result.measurements_used;
        return subtracted_measure(h, w_ms.weights, w_bs.weights, result.found_channel, power,
                                  rng, noiseless);
    };

    for (std::size_t path = 1; path <= n_s; ++path) {
        // exhaustive pair scan at the initial layer
        const int init_count = static_cast<int>(cb_ms.layers[static_cast<std::size_t>(i_ly)].size());
        SideState ms{&cb_ms, i_ly, 1};
        SideState bs{&cb_bs, i_ly, 1};
        {
            double best = -1.0;
            SearchStageStep step{static_cast<int>(path), "initial", i_ly, {}, {}, {}, 0, 0};
            for (int mpos = 1; mpos <= init_count; ++mpos) {
                for (int npos = 1; npos <= init_count; ++npos) {
                    const cd y = probe(cb_ms.at(i_ly, mpos), cb_bs.at(i_ly, npos));
                    if (trace) {
                        step.ms_positions.push_back(mpos);
                        step.bs_positions.push_back(npos);
                        step.magnitudes.push_back(std::abs(y));
                    }
                    if (std::abs(y) > best) {
                        best = std::abs(y);
                        ms.position = mpos;
                        bs.position = npos;
                    }
                }
            }
            if (trace) {
                step.winner_ms = ms.position;
                step.winner_bs = bs.position;
                trace->push_back(std::move(step));
            }
        }

        // two-sided refinement: MS tests children against the BS codeword,
        // then BS tests children against the new MS codeword; a side whose
        // codebook has run out of layers keeps its codeword fixed
        for (int stage = i_ly + 1; stage <= s_max; ++stage) {
            if (stage <= s_ms) {
                const std::vector<int> kids = children(cb_ms, ms.layer, ms.position);
                double best = -1.0;
                int best_pos = kids.front();
                SearchStageStep step{static_cast<int>(path), "refine-ms", stage, {}, {}, {}, 0, 0};
                for (int kid : kids) {
                    const cd y = probe(cb_ms.at(stage, kid), bs.cb->at(bs.layer, bs.position));
                    if (trace) {
                        step.ms_positions.push_back(kid);
                        step.bs_positions.push_back(bs.position);
                        step.magnitudes.push_back(std::abs(y));
                    }
                    if (std::abs(y) > best) {
                        best = std::abs(y);
                        best_pos = kid;
                    }
                }
                ms.layer = stage;
                ms.position = best_pos;
                if (trace) {
                    step.winner_ms = ms.position;
                    step.winner_bs = bs.position;
                    trace->push_back(std::move(step));
                }
            }
            if (stage <= s_bs) {
                const std::vector<int> kids = children(cb_bs, bs.layer, bs.position);
                double best = -1.0;
                int best_pos = kids.front();
                SearchStageStep step{static_cast<int>(path), "refine-bs", stage, {}, {}, {}, 0, 0};
                for (int kid : kids) {
                    const cd y = probe(ms.cb->at(ms.layer, ms.position), cb_bs.at(stage, kid));
                    if (trace) {
                        step.ms_positions.push_back(ms.position);
                        step.bs_positions.push_back(kid);
                        step.magnitudes.push_back(std::abs(y));
                    }
                    if (std::abs(y) > best) {
                        best = std::abs(y);
                        best_pos = kid;
                    }
                }
                bs.layer = stage;
                bs.position = best_pos;
                if (trace) {
                    step.winner_ms = ms.position;
                    step.winner_bs = bs.position;
                    trace->push_back(std::move(step));
                }
            }
        }

        // K x K high-resolution scan over the over-sampling children of the
        // winning basis beams
        const int k_int = static_cast<int>(k_over);
        std::pair<int, int> best_pair{(ms.position - 1) * k_int + 1,
                                      (bs.position - 1) * k_int + 1};
        cd best_y(0.0, 0.0);
        double best_mag = -1.0;
        SearchStageStep step{static_cast<int>(path), "high-res", kOversampleLayer, {}, {}, {}, 0,
                             0};
        for (int i = (ms.position - 1) * k_int + 1; i <= ms.position * k_int; ++i) {
            for (int j = (bs.position - 1) * k_int + 1; j <= bs.position * k_int; ++j) {
                const cd y = probe(cb_ms.oversample_at(i), cb_bs.oversample_at(j));
                if (trace) {
                    step.ms_positions.push_back(i);
                    step.bs_positions.push_back(j);
                    step.magnitudes.push_back(std::abs(y));
                }
                if (std::abs(y) > best_mag) {
                    best_mag = std::abs(y);
                    best_y = y;
                    best_pair = {i, j};
                }
            }
        }
        if (trace) {
            step.winner_ms = best_pair.first;
            step.winner_bs = best_pair.second;
            trace->push_back(std::move(step));
        }

        record_path(result, best_pair, best_y, cb_ms.oversample_at(best_pair.first).weights,
                    cb_bs.oversample_at(best_pair.second).weights);
    }
    return result;
}

} // namespace mmbeam
