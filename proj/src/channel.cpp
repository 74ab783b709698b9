// SPDX-License-Identifier: Apache-2.0

#include "mmbeam/channel.hpp"

#include <cmath>
#include <numbers>

#include "mmbeam/errors.hpp"

namespace mmbeam {

PathComponent make_path(cd gain, double aod_phys, double aoa_phys) {
    PathComponent p;
    p.gain = gain;
    p.aod_phys = aod_phys;
    p.aoa_phys = aoa_phys;
    p.aod_cos = std::cos(aod_phys);
    p.aoa_cos = std::cos(aoa_phys);
    return p;
}

std::vector<cd> steering_vector(std::size_t n, double omega) {
    if (n == 0)
        throw ContractViolation("steering_vector: antenna count must be >= 1");
    // reduce into [-1, 1) first so omega and omega + 2k produce bitwise
    // identical vectors (the response is 2-periodic)
    double reduced = std::fmod(omega + 1.0, 2.0);
    if (reduced < 0.0)
        reduced += 2.0;
    reduced -= 1.0;
    std::vector<cd> g(n);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = std::numbers::pi * static_cast<double>(i) * reduced;
        g[i] = cd(amp * std::cos(phase), amp * std::sin(phase));
    }
    return g;
}

namespace {

ComplexMatrix assemble_matrix(const std::vector<PathComponent> &paths, std::size_t n_a,
                              std::size_t m_a) {
    ComplexMatrix h(m_a, n_a);
    const double gain_scale = std::sqrt(static_cast<double>(n_a * m_a));
    for (const PathComponent &p : paths) {
        const std::vector<cd> g_ms = steering_vector(m_a, p.aoa_cos);
        const std::vector<cd> g_bs = steering_vector(n_a, p.aod_cos);
        const cd coeff = gain_scale * p.gain;
        for (std::size_t i = 0; i < m_a; ++i)
            for (std::size_t j = 0; j < n_a; ++j)
                h(i, j) += coeff * g_ms[i] * std::conj(g_bs[j]);
    }
    return h;
}

} // namespace

ChannelRealization generate_channel(std::size_t n_a, std::size_t m_a, std::size_t l, Rng &rng) {
    if (l < 1)
        throw ContractViolation("generate_channel: need at least one path");
    std::vector<PathComponent> paths;
    paths.reserve(l);
    const double path_var = 1.0 / static_cast<double>(l);
    for (std::size_t i = 0; i < l; ++i) {
        const cd gain = rng.complex_normal(path_var);
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        paths.push_back(make_path(gain, theta, phi));
    }
    return channel_from_paths(std::move(paths), n_a, m_a);
}

ChannelRealization channel_from_paths(std::vector<PathComponent> paths, std::size_t n_a,
                                      std::size_t m_a) {
    if (paths.empty())
        throw ContractViolation("channel_from_paths: need at least one path");
    ChannelRealization h;
    h.n_bs_antennas = n_a;
    h.n_ms_antennas = m_a;
    h.matrix = assemble_matrix(paths, n_a, m_a);
    h.paths = std::move(paths);
    return h;
}

cd measure(const ChannelRealization &h, std::span<const cd> w_ms, std::span<const cd> w_bs,
           double power, Rng &rng, bool noiseless) {
    if (w_ms.size() != h.n_ms_antennas || w_bs.size() != h.n_bs_antennas)
        throw ContractViolation("measure: combiner/precoder lengths must match antenna counts");
    if (power < 0.0)
        throw ContractViolation("measure: power must be nonnegative");
    cd y = std::sqrt(power) * quadratic_form(w_ms, h.matrix, w_bs);
    if (!noiseless) {
        const double w2 = vnorm(w_ms);
        y += rng.complex_normal(w2 * w2);
    }
    return y;
}

} // namespace mmbeam
