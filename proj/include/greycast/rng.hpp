#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace greycast {

/// splitmix64 step; also used to expand seeds into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Mixes a salt into a base seed so that nearby salts give uncorrelated streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t s = base ^ (salt * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    return splitmix64(s);
}

/**
 * xoshiro256++ with a splitmix64-seeded state.
 *
 * Hand-rolled rather than <random> engines/distributions so that draws are
 * bit-reproducible across standard library implementations.
 */
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
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

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

/**
 * Seeded source of uniform, normal and gamma variates.
 *
 * Normal draws use Box-Muller (pairs cached), gamma draws use
 * Marsaglia-Tsang with the shape<1 boost.
 */
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed = 0) : gen_(seed) {}

    /// Uniform on (0, 1); never returns 0 so log() is safe.
    double uniform01() {
        const std::uint64_t bits = gen_.next() >> 11;  // 53 random bits
        double u = static_cast<double>(bits) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925287 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Gamma(shape, rate) draw, i.e. mean shape/rate.
    double gamma(double shape, double rate) {
        if (!(shape > 0.0) || !(rate > 0.0))
            throw std::invalid_argument("gamma: shape and rate must be positive");
        if (shape < 1.0) {
            // boost: G(a) = G(a+1) * U^(1/a)
            const double g = gamma(shape + 1.0, 1.0);
            const double u = uniform01();
            return g * std::pow(u, 1.0 / shape) / rate;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
                return d * v / rate;
        }
    }

private:
    Xoshiro256pp gen_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace greycast
