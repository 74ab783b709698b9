// SPDX-License-Identifier: Apache-2.0

#ifndef MMBEAM_PRECODING_HPP
#define MMBEAM_PRECODING_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "mmbeam/channel.hpp"
#include "mmbeam/codebook.hpp"
#include "mmbeam/linalg.hpp"
#include "mmbeam/rng.hpp"
#include "mmbeam/search.hpp"

namespace mmbeam {

// Full hybrid precoding solution: steering-vector analog stages, SVD-based
// digital stages, and the per-stream power allocation.
struct PrecodingSolution {
    ComplexMatrix f_r;     // N_A x N_S analog precoder
    ComplexMatrix w_r;     // M_A x N_S analog combiner
    ComplexMatrix f_b;     // N_S x N_S digital precoder, ||F_R F_B||_F^2 = N_S
    ComplexMatrix w_b;     // N_S x N_S digital combiner
    std::vector<double> q; // power allocation, sums to P
};

struct DigitalPrecoding {
    ComplexMatrix w_b;
    ComplexMatrix f_b;
    std::vector<double> q;
    std::vector<double> effective_gains; // per-stream gains the water-filling saw
};

// Analog stages steer straight at the found over-sampling-layer angles.
std::pair<ComplexMatrix, ComplexMatrix> analog_precoders(const BeamSearchResult &result,
                                                         const Codebook &cb_bs,
                                                         const Codebook &cb_ms);

// The N_S x N_S equivalent channel W_R^H H F_R. The orthogonal-training
// estimation protocol is modeled analytically: noiseless gives the exact
// product, otherwise each entry picks up an independent CN(0, 1/training_snr)
// perturbation.
ComplexMatrix baseband_channel(const ChannelRealization &h, const ComplexMatrix &f_r,
                               const ComplexMatrix &w_r, double training_snr, Rng &rng,
                               bool noiseless);

// Whiten by R_n = W_R^H W_R, diagonalize by SVD, scale F_B for the transmit
// Frobenius constraint, and water-fill the resulting per-stream gains.
DigitalPrecoding digital_precoders(const ComplexMatrix &h_b, const ComplexMatrix &w_r,
                                   double power);

// q_i = max(0, mu - 1/gains_i^2) with mu tuned by bisection so sum(q) = P.
std::vector<double> waterfill(const std::vector<double> &gains, double total_power);

// Two streams steered at the same analog angle on one side make the combiner
// correlation exactly singular, so a colliding pair is redirected to the
// nearest unused over-sampling cell on that side (the index grid wraps: the
// cosine angle domain is a circle of length 2). kn_* are the over-sampling
// layer sizes K*M_A and K*N_A.
BeamSearchResult resolve_beam_collisions(const BeamSearchResult &result, std::size_t kn_ms,
                                         std::size_t kn_bs);

// Whole pipeline behind one call: analog steering from the search result
// (after collision resolution), baseband estimation, digital precoding and
// power allocation.
PrecodingSolution build_precoding_solution(const ChannelRealization &h,
                                           const BeamSearchResult &result,
                                           const Codebook &cb_bs, const Codebook &cb_ms,
                                           double power, double training_snr, Rng &rng,
                                           bool noiseless_estimation);

// log2 det(I + K_W^{-1/2} H_E Q H_E^H K_W^{-H/2}) on the true channel.
double achievable_rate(const ChannelRealization &h, const PrecodingSolution &sol, double power);

// Unconstrained benchmark: water-filled SVD precoding on the full channel.
double rate_bound(const ChannelRealization &h, std::size_t n_s, double power);

} // namespace mmbeam

#endif
