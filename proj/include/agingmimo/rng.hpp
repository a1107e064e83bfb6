// Seeded, splittable random stream. Every stochastic routine in the library
// takes one of these explicitly; there is no hidden global state. The
// generator is xoshiro256++ seeded through a splitmix64 chain, with gaussians
// from Box-Muller rather than std::normal_distribution so that a given seed
// produces identical streams on every platform and standard library.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace agingmimo {

class rng_stream {
public:
    explicit rng_stream(std::uint64_t seed) : key_(seed) {
        std::uint64_t st = seed;
        for (auto& w : s_) w = splitmix_next(st);
    }

    // Child stream independent of this stream's draw position. Deriving the
    // same tag from the same parent always yields the same child, which is
    // what makes per-trial and per-component streams reproducible no matter
    // how much the parent has been consumed in between.
    rng_stream derive(std::uint64_t tag) const {
        std::uint64_t st = key_;
        std::uint64_t h = splitmix_next(st);
        st ^= 0xd1342543de82ef95ULL * (tag + 0x632be59bd9b4e019ULL);
        h ^= splitmix_next(st);
        return rng_stream(h);
    }

    std::uint64_t next_u64() {
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

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal. Box-Muller pairs; the second member of each pair is
    // cached, so consecutive calls consume uniforms in a fixed pattern.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1], keeps the log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(two_pi * u2);
        has_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    // Circularly symmetric complex normal with unit total variance
    // (each component has variance 1/2). One Box-Muller pair per call.
    std::complex<double> cgaussian() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));
        return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
    }

private:
    static constexpr double two_pi = 6.283185307179586476925286766559;

    static std::uint64_t splitmix_next(std::uint64_t& state) {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t key_;
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace agingmimo
