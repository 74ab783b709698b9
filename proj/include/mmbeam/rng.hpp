// SPDX-License-Identifier: Apache-2.0

#ifndef MMBEAM_RNG_HPP
#define MMBEAM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace mmbeam {

// xoshiro256++ seeded through splitmix64. Every trial derives its own stream
// from (master_seed, stream ids), so parallel trials are reproducible no
// matter how they are scheduled. Gaussian draws use Box-Muller on the raw
// uniforms rather than std:: distributions, keeping sequences identical
// across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto &word : state_)
            word = splitmix64(x);
    }

    static Rng from_stream(std::uint64_t master_seed, std::uint64_t a, std::uint64_t b = 0,
                           std::uint64_t c = 0) {
        std::uint64_t x = master_seed ^ 0x9e3779b97f4a7c15ULL;
        x = splitmix64_mix(x + a);
        x = splitmix64_mix(x + b);
        x = splitmix64_mix(x + c);
        return Rng(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // N(0, 1)
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi() * u2);
    }

    // CN(0, variance): independent real/imag parts, variance/2 each
    std::complex<double> complex_normal(double variance) {
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1) * variance);
        return {r * std::cos(two_pi() * u2), r * std::sin(two_pi() * u2)};
    }

  private:
    static constexpr double two_pi() { return 6.283185307179586476925286766559; }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64_mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t splitmix64(std::uint64_t &x) {
        x += 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(x);
    }

    std::uint64_t state_[4];
};

} // namespace mmbeam

#endif
