// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmbeam/channel.hpp"
#include "mmbeam/codebook.hpp"
#include "mmbeam/errors.hpp"
#include "mmbeam/precoding.hpp"
#include "mmbeam/search.hpp"

using namespace mmbeam;

namespace {

double grid_angle(int index, std::size_t k, std::size_t n) {
    return -1.0 + (2.0 * index - 1.0) / static_cast<double>(k * n);
}

BeamSearchResult result_with_pairs(const std::vector<std::pair<int, int>> &pairs,
                                   std::size_t m_a, std::size_t n_a) {
    BeamSearchResult r;
    r.pairs = pairs;
    r.gains.assign(pairs.size(), cd(1.0, 0.0));
    r.found_channel = ComplexMatrix(m_a, n_a);
    return r;
}

double off_identity(const ComplexMatrix &m) {
    return (m - ComplexMatrix::identity(m.rows())).max_abs();
}

// full search + precode pipeline on a random channel
struct Pipeline {
    ChannelRealization h;
    BeamSearchResult result;
    PrecodingSolution sol;
    double power;
};

Pipeline run_pipeline(std::uint64_t seed, std::size_t n_s, double power,
                      const Codebook &cb) {
    Rng rng = Rng::from_stream(seed, 0);
    Pipeline p{generate_channel(cb.n_antennas, cb.n_antennas, 4, rng), {}, {}, power};
    p.result = hierarchical_search(p.h, cb, cb, n_s, 2, power, rng, true);
    p.sol = build_precoding_solution(p.h, p.result, cb, cb, power, 1e12, rng, true);
    return p;
}

} // namespace

TEST_CASE("analog precoders steer at the found over-sampling angles") {
    const Codebook cb = build_codebook(32, 2, 2);
    const auto r = result_with_pairs({{1, 1}}, 32, 32);
    const auto [f_r, w_r] = analog_precoders(r, cb, cb);
    REQUIRE(f_r.cols() == 1);
    const auto expect = steering_vector(32, -1.0 + 1.0 / 64.0);
    for (std::size_t i = 0; i < 32; ++i) {
        CHECK(std::abs(f_r(i, 0) - expect[i]) < 1e-15);
        CHECK(std::abs(w_r(i, 0) - expect[i]) < 1e-15);
    }
}

TEST_CASE("analog precoder columns are permutation covariant and unit norm") {
    const Codebook cb = build_codebook(16, 2, 2);
    const auto r1 = result_with_pairs({{3, 9}, {12, 25}}, 16, 16);
    const auto r2 = result_with_pairs({{12, 25}, {3, 9}}, 16, 16);
    const auto [f1, w1] = analog_precoders(r1, cb, cb);
    const auto [f2, w2] = analog_precoders(r2, cb, cb);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(f1(i, 0) == f2(i, 1));
        CHECK(f1(i, 1) == f2(i, 0));
        CHECK(w1(i, 0) == w2(i, 1));
    }
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(vnorm(f1.column(j)) - 1.0) < 1e-14);
        CHECK(std::abs(vnorm(w1.column(j)) - 1.0) < 1e-14);
    }
    CHECK_THROWS_AS(analog_precoders(result_with_pairs({}, 16, 16), cb, cb),
                    ContractViolation);
}

TEST_CASE("baseband channel equals the triple product when noiseless") {
    const Codebook cb = build_codebook(16, 2, 2);
    Rng rng(1);
    const ChannelRealization h = generate_channel(16, 16, 3, rng);
    const auto r = result_with_pairs({{4, 8}, {17, 30}}, 16, 16);
    const auto [f_r, w_r] = analog_precoders(r, cb, cb);
    const ComplexMatrix h_b = baseband_channel(h, f_r, w_r, 1.0, rng, true);
    const ComplexMatrix direct = matmul(w_r.hermitian(), matmul(h.matrix, f_r));
    CHECK((h_b - direct).max_abs() < 1e-12);

    // entry (i, k) is the angle-domain response at the found index pair
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 2; ++k) {
            const auto gm = steering_vector(16, grid_angle(r.pairs[i].first, 2, 16));
            const auto gb = steering_vector(16, grid_angle(r.pairs[k].second, 2, 16));
            CHECK(std::abs(h_b(i, k) - quadratic_form(gm, h.matrix, gb)) < 1e-12);
        }
}

TEST_CASE("matched single-path baseband entry is sqrt(N_A*M_A)*lambda") {
    const Codebook cb = build_codebook(32, 2, 2);
    const cd lambda(0.8, -0.3);
    const ChannelRealization h = channel_from_paths(
        {make_path(lambda, std::acos(grid_angle(40, 2, 32)), std::acos(grid_angle(12, 2, 32)))},
        32, 32);
    const auto r = result_with_pairs({{12, 40}}, 32, 32);
    const auto [f_r, w_r] = analog_precoders(r, cb, cb);
    Rng rng(2);
    const ComplexMatrix h_b = baseband_channel(h, f_r, w_r, 1.0, rng, true);
    CHECK(std::abs(h_b(0, 0) - cd(32.0, 0.0) * lambda) < 1e-10);
}

TEST_CASE("noisy baseband estimation perturbs entries at the training SNR") {
    const Codebook cb = build_codebook(16, 2, 2);
    Rng rng(3);
    const ChannelRealization h = generate_channel(16, 16, 2, rng);
    const auto r = result_with_pairs({{4, 8}}, 16, 16);
    const auto [f_r, w_r] = analog_precoders(r, cb, cb);
    const ComplexMatrix clean = baseband_channel(h, f_r, w_r, 1.0, rng, true);
    double acc = 0.0;
    const int draws = 4000;
    const double rho = 16.0;
    for (int i = 0; i < draws; ++i) {
        const ComplexMatrix noisy = baseband_channel(h, f_r, w_r, rho, rng, false);
        acc += std::norm(noisy(0, 0) - clean(0, 0));
    }
    CHECK(acc / draws == doctest::Approx(1.0 / rho).epsilon(0.1));
}

TEST_CASE("digital precoders on an already-diagonal baseband channel") {
    // orthogonal steering columns (basis beams) make R_n the identity
    const Codebook cb = build_codebook(8, 2, 1);
    const auto r = result_with_pairs({{2, 2}, {5, 5}}, 8, 8);
    const auto [f_r, w_r] = analog_precoders(r, cb, cb);
    CHECK(off_identity(matmul(w_r.hermitian(), w_r)) < 1e-12);

    const ComplexMatrix h_b(2, 2, {cd(2, 0), cd(0, 0), cd(0, 0), cd(1, 0)});
    const DigitalPrecoding d = digital_precoders(h_b, w_r, 5.0);
    CHECK(off_identity(d.w_b) < 1e-10);
    CHECK(off_identity(d.f_b) < 1e-10);
    CHECK(d.effective_gains[0] == doctest::Approx(2.0));
    CHECK(d.effective_gains[1] == doctest::Approx(1.0));
    double qsum = 0.0;
    for (double q : d.q)
        qsum += q;
    CHECK(qsum == doctest::Approx(5.0));
}

TEST_CASE("digital precoders diagonalize random baseband channels") {
    const Codebook cb = build_codebook(8, 2, 1);
    const auto r = result_with_pairs({{1, 3}, {4, 6}, {7, 8}}, 8, 8);
    const auto [f_r, w_r] = analog_precoders(r, cb, cb);
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cd> e(9);
        for (auto &z : e)
            z = rng.complex_normal(1.0);
        const ComplexMatrix h_b(3, 3, e);
        const DigitalPrecoding d = digital_precoders(h_b, w_r, 2.0);
        const ComplexMatrix eff = matmul(d.w_b.hermitian(), matmul(h_b, d.f_b));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                if (i == j) {
                    CHECK(eff(i, j).real() >= -1e-10);
                    CHECK(std::abs(eff(i, j).imag()) < 1e-10);
                    CHECK(eff(i, j).real() == doctest::Approx(d.effective_gains[i]));
                } else {
                    CHECK(std::abs(eff(i, j)) < 1e-10);
                }
            }
    }
}

TEST_CASE("digital precoders reject identical combiner columns") {
    const Codebook cb = build_codebook(8, 2, 2);
    const auto r = result_with_pairs({{3, 1}, {3, 9}}, 8, 8); // same MS beam twice
    const auto [f_r, w_r] = analog_precoders(r, cb, cb);
    const ComplexMatrix h_b(2, 2, {cd(1, 0), cd(0, 0), cd(0, 0), cd(1, 0)});
    CHECK_THROWS_AS(digital_precoders(h_b, w_r, 1.0), DegenerateCombiner);
}

TEST_CASE("waterfill closed-form cases") {
    const auto even = waterfill({2.0, 2.0}, 6.0);
    CHECK(even[0] == doctest::Approx(3.0));
    CHECK(even[1] == doctest::Approx(3.0));

    const auto single = waterfill({0.7}, 2.5);
    CHECK(single[0] == doctest::Approx(2.5));

    // active-set oracle for gains {1.0, 0.1}, P = 1: both-active water level
    // mu = (1 + 1 + 100)/2 = 51 gives q2 = -49 < 0, so the weak stream is
    // shut off and the strong stream takes everything
    const auto uneven = waterfill({1.0, 0.1}, 1.0);
    CHECK(uneven[0] == doctest::Approx(1.0));
    CHECK(uneven[1] == doctest::Approx(0.0));

    CHECK_THROWS_AS(waterfill({}, 1.0), ContractViolation);
    CHECK_THROWS_AS(waterfill({1.0, 0.0}, 1.0), ContractViolation);
    CHECK_THROWS_AS(waterfill({1.0}, 0.0), ContractViolation);
}

TEST_CASE("waterfill satisfies the KKT conditions on random gain sets") {
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.next_u64() % 6;
        std::vector<double> gains(n);
        for (double &g : gains)
            g = std::exp(rng.uniform(-3.0, 2.0));
        const double p = std::exp(rng.uniform(-1.0, 3.0));
        const auto q = waterfill(gains, p);
        double qsum = 0.0, mu = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            qsum += q[i];
            if (q[i] > 0.0)
                mu = std::max(mu, q[i] + 1.0 / (gains[i] * gains[i]));
        }
        CHECK(std::abs(qsum - p) <= 1e-10);
        for (std::size_t i = 0; i < n; ++i) {
            if (q[i] > 0.0)
                CHECK(std::abs(q[i] - (mu - 1.0 / (gains[i] * gains[i]))) <= 1e-10);
            else
                CHECK(mu <= 1.0 / (gains[i] * gains[i]) + 1e-10);
        }
    }
}

TEST_CASE("achievable rate of the zero channel is zero") {
    const Codebook cb = build_codebook(8, 2, 2);
    const ChannelRealization h =
        channel_from_paths({make_path(cd(0.0, 0.0), 1.0, 2.0)}, 8, 8);
    Rng rng(6);
    const BeamSearchResult r = hierarchical_search(h, cb, cb, 1, 2, 1.0, rng, true);
    const PrecodingSolution sol = build_precoding_solution(h, r, cb, cb, 1.0, 1e12, rng, true);
    CHECK(achievable_rate(h, sol, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("matched single path achieves log2(1 + P*N_A*M_A)") {
    const Codebook cb = build_codebook(32, 2, 2);
    const ChannelRealization h = channel_from_paths(
        {make_path(cd(1.0, 0.0), std::acos(grid_angle(9, 2, 32)),
                   std::acos(grid_angle(44, 2, 32)))},
        32, 32);
    Rng rng(7);
    const double p = 10.0;
    const BeamSearchResult r = hierarchical_search(h, cb, cb, 1, 2, p, rng, true);
    const PrecodingSolution sol = build_precoding_solution(h, r, cb, cb, p, 1e12, rng, true);
    const double expect = std::log2(1.0 + p * 1024.0);
    CHECK(achievable_rate(h, sol, p) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(rate_bound(h, 1, p) == doctest::Approx(expect).epsilon(1e-9));
    // noiseless estimation, exact on-grid single path: rate meets the bound
    CHECK(std::abs(achievable_rate(h, sol, p) - rate_bound(h, 1, p)) < 1e-6);
}

TEST_CASE("rate is invariant under diagonal rescaling of the digital combiner") {
    const Codebook cb = build_codebook(16, 2, 2);
    const Pipeline p = run_pipeline(8, 2, 31.6, cb);
    const double base = achievable_rate(p.h, p.sol, p.power);
    PrecodingSolution scaled = p.sol;
    const cd d0(2.5, 0.0), d1(0.0, -0.7);
    for (std::size_t i = 0; i < scaled.w_b.rows(); ++i) {
        scaled.w_b(i, 0) *= d0;
        if (scaled.w_b.cols() > 1)
            scaled.w_b(i, 1) *= d1;
    }
    CHECK(achievable_rate(p.h, scaled, p.power) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("pipeline solutions satisfy the power constraints") {
    const Codebook cb = build_codebook(16, 2, 2);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const Pipeline p = run_pipeline(seed, 2, 10.0, cb);
        const std::size_t n_streams = p.sol.f_b.cols();
        // constant-amplitude analog stages
        for (std::size_t j = 0; j < n_streams; ++j)
            for (std::size_t i = 0; i < 16; ++i) {
                CHECK(std::abs(std::abs(p.sol.f_r(i, j)) - 0.25) < 1e-12);
                CHECK(std::abs(std::abs(p.sol.w_r(i, j)) - 0.25) < 1e-12);
            }
        const double fro = matmul(p.sol.f_r, p.sol.f_b).frobenius_norm();
        CHECK(std::abs(fro * fro - static_cast<double>(n_streams)) < 1e-10);
        double qsum = 0.0;
        for (double q : p.sol.q) {
            CHECK(q >= 0.0);
            qsum += q;
        }
        CHECK(std::abs(qsum - 10.0) < 1e-10);
    }
}

TEST_CASE("rate bound dominates the pipeline rate") {
    const Codebook cb = build_codebook(16, 2, 2);
    for (std::uint64_t seed = 100; seed < 160; ++seed) {
        const Pipeline p = run_pipeline(seed, 2, 10.0, cb);
        CHECK(achievable_rate(p.h, p.sol, p.power) <= rate_bound(p.h, 2, p.power) + 1e-9);
    }
}

TEST_CASE("rate bound of a rank-1 channel ignores the zero singular value") {
    const ChannelRealization h =
        channel_from_paths({make_path(cd(1.0, 0.0), 0.9, 1.8)}, 16, 16);
    CHECK(rate_bound(h, 2, 5.0) == doctest::Approx(rate_bound(h, 1, 5.0)));
    CHECK(rate_bound(h, 1, 5.0) == doctest::Approx(std::log2(1.0 + 5.0 * 256.0)));
    CHECK_THROWS_AS(rate_bound(h, 17, 5.0), ContractViolation);
}
