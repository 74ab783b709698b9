// SPDX-License-Identifier: Apache-2.0

#include "mmbeam/codebook.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mmbeam/channel.hpp"
#include "mmbeam/errors.hpp"

namespace mmbeam {

const Codeword &Codebook::at(int layer, int position) const {
    if (layer < 0 || layer > static_cast<int>(depth))
        throw ContractViolation("Codebook::at: layer " + std::to_string(layer) + " out of range");
    const auto &lay = layers[static_cast<std::size_t>(layer)];
    if (position < 1 || position > static_cast<int>(lay.size()))
        throw ContractViolation("Codebook::at: position " + std::to_string(position) +
                                " out of range in layer " + std::to_string(layer));
    return lay[static_cast<std::size_t>(position - 1)];
}

const Codeword &Codebook::oversample_at(int index) const {
    if (index < 1 || index > static_cast<int>(oversample_layer.size()))
        throw ContractViolation("Codebook::oversample_at: index " + std::to_string(index) +
                                " out of range");
    return oversample_layer[static_cast<std::size_t>(index - 1)];
}

namespace {

void normalize(std::vector<cd> &w) {
    const double nrm = vnorm(w);
    if (nrm == 0.0)
        throw NumericalFailure("codebook: produced an all-zero codeword", 0);
    for (cd &z : w)
        z /= nrm;
}

// First codeword of the layer lev = S - ell: split the array into m_s
// sub-arrays of n_sub antennas; sub-array m steers a basis beam of the
// sub-array size with an alternating sign, and sub-arrays beyond n_act are
// switched off. Deactivation happens on odd ell only.
std::vector<cd> joint_first_codeword(std::size_t n, std::size_t ell) {
    const std::size_t m_s = std::size_t{1} << ((ell + 1) / 2);
    const std::size_t n_sub = n / m_s;
    const std::size_t n_act = (ell % 2 == 1) ? m_s / 2 : m_s;

    std::vector<cd> w(n, cd(0.0, 0.0));
    for (std::size_t m = 1; m <= n_act; ++m) {
        const double omega = -1.0 + (2.0 * static_cast<double>(m) - 1.0) /
                                        static_cast<double>(n_sub);
        const std::vector<cd> sub = steering_vector(n_sub, omega);
        const double sign = (m % 2 == 1) ? -1.0 : 1.0; // exp(j*m*pi)
        for (std::size_t i = 0; i < n_sub; ++i)
            w[(m - 1) * n_sub + i] = sign * sub[i];
    }
    normalize(w);
    return w;
}

// w(k, n) = w(k, 1) rotated by the layer's beam step in cosine space:
// entry-wise product with sqrt(N) g(N, shift) advances the pattern by shift.
std::vector<cd> rotate_codeword(const std::vector<cd> &first, double shift) {
    const std::size_t n = first.size();
    std::vector<cd> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = std::numbers::pi * static_cast<double>(i) * shift;
        w[i] = first[i] * cd(std::cos(phase), std::sin(phase));
    }
    return w;
}

} // namespace

Codebook build_codebook(std::size_t n, std::size_t m, std::size_t k_oversample) {
    if (m != 2)
        throw UnsupportedConfiguration(
            "build_codebook: the joint sub-array/deactivation recipe is defined for M = 2 only");
    if (k_oversample < 1)
        throw UnsupportedConfiguration("build_codebook: over-sampling factor must be >= 1");
    std::size_t depth = 0;
    for (std::size_t v = n; v > 1; v /= m) {
        if (v % m != 0)
            throw UnsupportedConfiguration("build_codebook: antenna count " + std::to_string(n) +
                                           " is not a power of " + std::to_string(m));
        ++depth;
    }
    if (n < 1)
        throw UnsupportedConfiguration("build_codebook: antenna count must be >= 1");

    Codebook cb;
    cb.n_antennas = n;
    cb.hierarchical_factor = m;
    cb.oversample_factor = k_oversample;
    cb.depth = depth;
    cb.layers.resize(depth + 1);

    const auto coverage = [](std::size_t layer_size, int pos) {
        const double width = 2.0 / static_cast<double>(layer_size);
        return std::pair<double, double>{-1.0 + width * (pos - 1), -1.0 + width * pos};
    };

    // layer S: the N basis beams
    auto &basis = cb.layers[depth];
    basis.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double omega =
            -1.0 + (2.0 * static_cast<double>(i) - 1.0) / static_cast<double>(n);
        auto [lo, hi] = coverage(n, static_cast<int>(i));
        basis.push_back({steering_vector(n, omega), static_cast<int>(depth),
                         static_cast<int>(i), lo, hi});
    }

    // layers S-1 .. 0 via the joint construction plus per-position rotation
    for (std::size_t ell = 1; ell <= depth; ++ell) {
        const std::size_t lev = depth - ell;
        const std::size_t count = std::size_t{1} << lev;
        const std::vector<cd> first = joint_first_codeword(n, ell);
        auto &layer = cb.layers[lev];
        layer.reserve(count);
        for (std::size_t pos = 1; pos <= count; ++pos) {
            const double shift = 2.0 * static_cast<double>(pos - 1) / static_cast<double>(count);
            std::vector<cd> w = pos == 1 ? first : rotate_codeword(first, shift);
            normalize(w);
            auto [lo, hi] = coverage(count, static_cast<int>(pos));
            layer.push_back({std::move(w), static_cast<int>(lev), static_cast<int>(pos), lo, hi});
        }
    }

    const std::size_t n_over = k_oversample * n;
    cb.oversample_layer.reserve(n_over);
    for (std::size_t i = 1; i <= n_over; ++i) {
        const double omega =
            -1.0 + (2.0 * static_cast<double>(i) - 1.0) / static_cast<double>(n_over);
        auto [lo, hi] = coverage(n_over, static_cast<int>(i));
        cb.oversample_layer.push_back(
            {steering_vector(n, omega), kOversampleLayer, static_cast<int>(i), lo, hi});
    }
    return cb;
}

double beam_gain(const Codeword &w, double omega) {
    const std::vector<cd> g = steering_vector(w.weights.size(), omega);
    return std::abs(vdot(w.weights, g));
}

std::vector<int> children(const Codebook &cb, int layer, int position) {
    if (layer < 0 || layer >= static_cast<int>(cb.depth))
        throw ContractViolation("children: layer " + std::to_string(layer) +
                                " has no child layer");
    const int layer_size = static_cast<int>(cb.layers[static_cast<std::size_t>(layer)].size());
    if (position < 1 || position > layer_size)
        throw ContractViolation("children: position " + std::to_string(position) +
                                " out of range in layer " + std::to_string(layer));
    std::vector<int> kids(cb.hierarchical_factor);
    const int base = (position - 1) * static_cast<int>(cb.hierarchical_factor);
    for (std::size_t i = 0; i < cb.hierarchical_factor; ++i)
        kids[i] = base + static_cast<int>(i) + 1;
    return kids;
}

} // namespace mmbeam
