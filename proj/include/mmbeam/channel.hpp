// SPDX-License-Identifier: Apache-2.0

#ifndef MMBEAM_CHANNEL_HPP
#define MMBEAM_CHANNEL_HPP

#include <cstddef>
#include <vector>

#include "mmbeam/linalg.hpp"
#include "mmbeam/rng.hpp"

namespace mmbeam {

// One multipath component: complex gain plus departure/arrival angles,
// kept both as physical angles (radians) and their cosines.
struct PathComponent {
    cd gain;         // lambda
    double aod_cos;  // psi, BS side
    double aoa_cos;  // Omega, MS side
    double aod_phys; // theta, radians in [0, 2pi)
    double aoa_phys; // phi, radians in [0, 2pi)
};

PathComponent make_path(cd gain, double aod_phys, double aoa_phys);

// A narrowband L-path channel between an N_A-antenna BS and an M_A-antenna
// MS, with the dense M_A x N_A matrix assembled from the path list.
struct ChannelRealization {
    std::vector<PathComponent> paths;
    std::size_t n_bs_antennas; // N_A
    std::size_t n_ms_antennas; // M_A
    ComplexMatrix matrix;      // M_A x N_A
};

// ULA steering vector: entry i is exp(j*pi*i*omega)/sqrt(n). Periodic in
// omega with period 2.
std::vector<cd> steering_vector(std::size_t n, double omega);

// Path gains CN(0, 1/L) i.i.d.; physical AoD/AoA uniform on [0, 2pi).
ChannelRealization generate_channel(std::size_t n_a, std::size_t m_a, std::size_t l, Rng &rng);

// Deterministic construction from an explicit path list.
ChannelRealization channel_from_paths(std::vector<PathComponent> paths, std::size_t n_a,
                                      std::size_t m_a);

// One beamformed observation: w_ms^H (sqrt(power) H w_bs + n), where the
// combined noise term is CN(0, ||w_ms||^2) and is skipped when noiseless.
cd measure(const ChannelRealization &h, std::span<const cd> w_ms, std::span<const cd> w_bs,
           double power, Rng &rng, bool noiseless);

} // namespace mmbeam

#endif
