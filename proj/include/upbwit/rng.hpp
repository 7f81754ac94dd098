// rng.hpp — deterministic PRNG used for every randomized routine in the
// library. The algorithm is fixed so that seeded runs reproduce bit-for-bit
// across platforms: xoshiro256++ state-seeded by splitmix64, uniforms from
// the top 53 bits, normals via Box-Muller. Task streams are forked from a
// root seed by index, so results do not depend on scheduling order.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace upbwit::rng {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    /// Independent stream for task `index` under the same root seed.
    static Xoshiro256pp fork(std::uint64_t root_seed, std::uint64_t index) {
        SplitMix64 sm(root_seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
        return Xoshiro256pp(sm.next());
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    std::complex<double> complex_normal() { return {normal(), normal()}; }

    /// Random unit vector in C^d (Haar on the sphere).
    std::vector<std::complex<double>> unit_vector(std::size_t d) {
        std::vector<std::complex<double>> v(d);
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (auto& z : v) {
                z = complex_normal();
                n2 += std::norm(z);
            }
        } while (n2 < 1e-24);
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& z : v) z *= inv;
        return v;
    }

    /// Flat (Dirichlet(1,..,1)) point on the k-simplex.
    std::vector<double> simplex_weights(std::size_t k) {
        std::vector<double> w(k);
        double sum = 0.0;
        for (auto& x : w) {
            x = -std::log(1.0 - uniform());
            sum += x;
        }
        for (auto& x : w) x /= sum;
        return w;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace upbwit::rng
