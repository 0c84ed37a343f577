#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "levyma/common.hpp"

namespace levyma::rng {

// Reproducible random stream keyed by (seed, stream_id).
//
// xoshiro256++ core seeded through splitmix64, with the stream id folded into
// the splitmix state. Replications use distinct stream ids on one seed; the
// draw sequence is identical across platforms because every variate transform
// below is explicit (std::random distributions are not portable).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t sm = seed ^ (0xA0761D6478BD642FULL * (stream_id + 1));
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
        // All-zero state is invalid for xoshiro; splitmix output makes this
        // unreachable in practice, the guard is belt and braces.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next_u64() {
        std::uint64_t* s = state_.data();
        std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53 random bits.
    double uniform01() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return double((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform on (lo, hi), endpoints excluded.
    double uniform_open(double lo, double hi) {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return lo + (hi - lo) * u;
    }

    double exponential() { return -std::log(uniform_pos()); }

    // Standard normal via Box-Muller; the sine partner is cached, so draws
    // come in deterministic pairs.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double r = std::sqrt(2.0 * exponential());
        double theta = 6.283185307179586476925286766559 * uniform01();
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    // Poisson count by exponential spacings; O(mean) uniforms. Mean sizes in
    // this project are jump intensities over bounded windows (at most a few
    // thousand), where this is both exact and fast enough.
    std::uint64_t poisson(double mean) {
        require(mean >= 0.0 && std::isfinite(mean), "poisson: mean must be finite and >= 0");
        std::uint64_t count = 0;
        double acc = exponential();
        while (acc <= mean) {
            ++count;
            acc += exponential();
        }
        return count;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace levyma::rng
