// SPDX-License-Identifier: Apache-2.0

#ifndef MMBEAM_CODEBOOK_HPP
#define MMBEAM_CODEBOOK_HPP

#include <cstddef>
#include <vector>

#include "mmbeam/linalg.hpp"

namespace mmbeam {

// Codeword::layer value for entries of the over-sampling layer.
inline constexpr int kOversampleLayer = -1;

// One analog beamforming weight vector. Nonzero entries share a common
// magnitude (phase-shifter hardware); coverage is the slice of cosine-angle
// space the beam is responsible for.
struct Codeword {
    std::vector<cd> weights;
    int layer;    // 0..S, or kOversampleLayer
    int position; // 1-based within the layer
    double coverage_lo;
    double coverage_hi;
};

// Hierarchical beam codebook: layer k holds M^k codewords whose coverages
// tile [-1, 1]; layer S holds the N basis beams; the over-sampling layer
// holds K*N steering vectors at K times the basis resolution.
struct Codebook {
    std::size_t n_antennas;          // N = M^S
    std::size_t hierarchical_factor; // M
    std::size_t oversample_factor;   // K
    std::size_t depth;               // S
    std::vector<std::vector<Codeword>> layers;
    std::vector<Codeword> oversample_layer;

    const Codeword &at(int layer, int position) const; // 1-based position
    const Codeword &oversample_at(int index) const;    // 1-based
};

// Joint sub-array and deactivation construction. Wide beams are shaped by
// splitting the array into sub-arrays that each steer a narrow beam at a
// different slice of the target coverage, switching off half of them on
// alternate layers. Only the M = 2 recipe is defined.
Codebook build_codebook(std::size_t n, std::size_t m, std::size_t k_oversample);

// |w^H g(N, omega)|: amplitude gain of the codeword toward cosine angle omega.
double beam_gain(const Codeword &w, double omega);

// Positions of the M child codewords of (layer, position) in layer+1.
std::vector<int> children(const Codebook &cb, int layer, int position);

} // namespace mmbeam

#endif
