// SPDX-License-Identifier: Apache-2.0

#include "mmbeam/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mmbeam/errors.hpp"

namespace mmbeam {

std::pair<ComplexMatrix, ComplexMatrix> analog_precoders(const BeamSearchResult &result,
                                                         const Codebook &cb_bs,
                                                         const Codebook &cb_ms) {
    if (result.pairs.empty())
        throw ContractViolation("analog_precoders: search result has no found paths");
    std::vector<std::vector<cd>> f_cols, w_cols;
    f_cols.reserve(result.pairs.size());
    w_cols.reserve(result.pairs.size());
    for (const auto &[i_ms, j_bs] : result.pairs) {
        w_cols.push_back(cb_ms.oversample_at(i_ms).weights);
        f_cols.push_back(cb_bs.oversample_at(j_bs).weights);
    }
    return {from_columns(f_cols), from_columns(w_cols)};
}

ComplexMatrix baseband_channel(const ChannelRealization &h, const ComplexMatrix &f_r,
                               const ComplexMatrix &w_r, double training_snr, Rng &rng,
                               bool noiseless) {
    if (f_r.rows() != h.n_bs_antennas || w_r.rows() != h.n_ms_antennas)
        throw ContractViolation("baseband_channel: analog matrices must match antenna counts");
    if (f_r.cols() != w_r.cols())
        throw ContractViolation("baseband_channel: precoder/combiner column counts must agree");
    ComplexMatrix h_b = matmul(w_r.hermitian(), matmul(h.matrix, f_r));
    if (!noiseless) {
        if (!(training_snr > 0.0))
            throw ContractViolation("baseband_channel: training SNR must be positive");
        for (std::size_t i = 0; i < h_b.rows(); ++i)
            for (std::size_t j = 0; j < h_b.cols(); ++j)
                h_b(i, j) += rng.complex_normal(1.0 / training_snr);
    }
    return h_b;
}

std::vector<double> waterfill(const std::vector<double> &gains, double total_power) {
    if (gains.empty())
        throw ContractViolation("waterfill: need at least one gain");
    if (!(total_power > 0.0))
        throw ContractViolation("waterfill: total power must be positive");
    for (double g : gains)
        if (!(g > 0.0))
            throw ContractViolation("waterfill: gains must be positive");

    std::vector<double> inv_g2(gains.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        inv_g2[i] = 1.0 / (gains[i] * gains[i]);
        lo = std::min(lo, inv_g2[i]);
        hi = std::max(hi, inv_g2[i]);
    }
    hi += total_power;

    const auto allocated = [&](double mu) {
        double s = 0.0;
        for (double v : inv_g2)
            s += std::max(0.0, mu - v);
        return s;
    };

    // water level by bisection; the allocation is monotone in mu
    double mu = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mu = 0.5 * (lo + hi);
        const double s = allocated(mu);
        if (std::abs(s - total_power) <= 1e-12)
            break;
        (s < total_power ? lo : hi) = mu;
    }

    std::vector<double> q(gains.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        q[i] = std::max(0.0, mu - inv_g2[i]);
        sum += q[i];
    }
    // pin the trace constraint exactly by scaling out residual bisection error
    if (sum > 0.0) {
        const double fix = total_power / sum;
        for (double &v : q)
            v *= fix;
    }
    return q;
}

DigitalPrecoding digital_precoders(const ComplexMatrix &h_b, const ComplexMatrix &w_r,
                                   double power) {
    if (h_b.rows() != h_b.cols() || h_b.rows() == 0)
        throw ContractViolation("digital_precoders: baseband channel must be square");
    if (w_r.cols() != h_b.rows())
        throw ContractViolation("digital_precoders: combiner width must match baseband channel");

    const ComplexMatrix r_n = matmul(w_r.hermitian(), w_r);
    ComplexMatrix r_inv_sqrt;
    try {
        r_inv_sqrt = hermitian_inv_sqrt(r_n);
    } catch (const ContractViolation &e) {
        throw DegenerateCombiner(
            std::string("digital_precoders: combiner correlation is singular: ") + e.what());
    }

    const SvdFactors f = svd(matmul(r_inv_sqrt, h_b));

    DigitalPrecoding out;
    out.w_b = matmul(r_inv_sqrt, f.u); // R_n^{-H/2} U_B; the root is Hermitian
    // F_B = V_B already meets ||F_R F_B||_F^2 = N_S: V_B is unitary and the
    // analog columns are unit-norm steering vectors, so the global scale is 1
    out.f_b = f.v;
    out.effective_gains = f.singular_values;

    // streams with numerically zero gain are excluded from the water-filling;
    // if nothing is detectable the power is spread evenly to keep Tr(Q) = P
    const double g_max =
        *std::max_element(out.effective_gains.begin(), out.effective_gains.end());
    std::vector<double> positive;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < out.effective_gains.size(); ++i) {
        if (out.effective_gains[i] > g_max * 1e-12 && out.effective_gains[i] > 0.0) {
            positive.push_back(out.effective_gains[i]);
            index.push_back(i);
        }
    }
    out.q.assign(out.effective_gains.size(), 0.0);
    if (positive.empty()) {
        out.q.assign(out.effective_gains.size(),
                     power / static_cast<double>(out.effective_gains.size()));
        return out;
    }
    const std::vector<double> filled = waterfill(positive, power);
    for (std::size_t i = 0; i < filled.size(); ++i)
        out.q[index[i]] = filled[i];
    return out;
}

BeamSearchResult resolve_beam_collisions(const BeamSearchResult &result, std::size_t kn_ms,
                                         std::size_t kn_bs) {
    const auto nudge = [](int index, const std::vector<int> &used, std::size_t kn) {
        const auto taken = [&](int v) {
            return std::find(used.begin(), used.end(), v) != used.end();
        };
        if (!taken(index))
            return index;
        for (int step = 1; step < static_cast<int>(kn); ++step) {
            for (int candidate : {index + step, index - step}) {
                const int wrapped =
                    (candidate - 1 + 2 * static_cast<int>(kn)) % static_cast<int>(kn) + 1;
                if (!taken(wrapped))
                    return wrapped;
            }
        }
        return -1;
    };

    BeamSearchResult out = result;
    out.pairs.clear();
    out.gains.clear();
    std::vector<int> used_i, used_j;
    for (std::size_t idx = 0; idx < result.pairs.size(); ++idx) {
        const int i = nudge(result.pairs[idx].first, used_i, kn_ms);
        const int j = nudge(result.pairs[idx].second, used_j, kn_bs);
        if (i < 0 || j < 0)
            continue;
        used_i.push_back(i);
        used_j.push_back(j);
        out.pairs.emplace_back(i, j);
        out.gains.push_back(result.gains[idx]);
    }
    return out;
}

PrecodingSolution build_precoding_solution(const ChannelRealization &h,
                                           const BeamSearchResult &result,
                                           const Codebook &cb_bs, const Codebook &cb_ms,
                                           double power, double training_snr, Rng &rng,
                                           bool noiseless_estimation) {
    const BeamSearchResult streams =
        resolve_beam_collisions(result, cb_ms.oversample_layer.size(),
                                cb_bs.oversample_layer.size());
    auto [f_r, w_r] = analog_precoders(streams, cb_bs, cb_ms);
    const ComplexMatrix h_b =
        baseband_channel(h, f_r, w_r, training_snr, rng, noiseless_estimation);
    DigitalPrecoding dig = digital_precoders(h_b, w_r, power);
    PrecodingSolution sol;
    sol.f_r = std::move(f_r);
    sol.w_r = std::move(w_r);
    sol.f_b = std::move(dig.f_b);
    sol.w_b = std::move(dig.w_b);
    sol.q = std::move(dig.q);
    return sol;
}

double achievable_rate(const ChannelRealization &h, const PrecodingSolution &sol, double power) {
    const std::size_t n_streams = sol.f_b.cols();
    if (sol.q.size() != n_streams)
        throw ContractViolation("achievable_rate: power allocation length mismatch");
    double qsum = 0.0;
    for (double v : sol.q) {
        if (v < 0.0)
            throw ContractViolation("achievable_rate: negative power allocation");
        qsum += v;
    }
    if (std::abs(qsum - power) > 1e-6 * std::max(1.0, power))
        throw ContractViolation("achievable_rate: power allocation does not sum to P");

    const ComplexMatrix wrwb = matmul(sol.w_r, sol.w_b);
    const ComplexMatrix h_e =
        matmul(wrwb.hermitian(), matmul(h.matrix, matmul(sol.f_r, sol.f_b)));
    const ComplexMatrix k_w = matmul(wrwb.hermitian(), wrwb);

    ComplexMatrix whiten;
    try {
        whiten = hermitian_inv_sqrt(k_w);
    } catch (const ContractViolation &e) {
        throw DegenerateCombiner(std::string("achievable_rate: combined combiner is singular: ") +
                                 e.what());
    }

    const ComplexMatrix a = matmul(whiten, h_e); // K_W^{-1/2} H_E
    ComplexMatrix inner = ComplexMatrix::identity(n_streams);
    for (std::size_t i = 0; i < n_streams; ++i)
        for (std::size_t j = 0; j < n_streams; ++j) {
            cd acc(0.0, 0.0);
            for (std::size_t k = 0; k < n_streams; ++k)
                acc += a(i, k) * sol.q[k] * std::conj(a(j, k));
            inner(i, j) += acc;
        }
    return logdet_hermitian(inner) / std::numbers::ln2;
}

double rate_bound(const ChannelRealization &h, std::size_t n_s, double power) {
    if (n_s < 1 || n_s > std::min(h.n_bs_antennas, h.n_ms_antennas))
        throw ContractViolation("rate_bound: n_s must be in [1, min(M_A, N_A)]");
    const SvdFactors f = svd(h.matrix);
    std::vector<double> gains;
    const double s_max = f.singular_values.front();
    for (std::size_t i = 0; i < n_s; ++i) {
        const double s = f.singular_values[i];
        if (s > s_max * 1e-12 && s > 0.0)
            gains.push_back(s);
    }
    if (gains.empty())
        return 0.0;
    const std::vector<double> q = waterfill(gains, power);
    double rate = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i)
        rate += std::log2(1.0 + q[i] * gains[i] * gains[i]);
    return rate;
}

} // namespace mmbeam
