#pragma once

#include <cstdint>
#include <numbers>
#include <random>

#include "pimu/geometry.hpp"

namespace pimu {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random stream: std::mt19937_64 (fully specified by the
/// standard) plus hand-rolled distributions, so seeded output never depends
/// on the platform's <random> distribution implementations.
class rng {
public:
    explicit rng(std::uint64_t seed) : gen_(seed) {}

    /// Independent child stream for (seed, index) pairs, e.g. one per tree.
    static rng derive(std::uint64_t seed, std::uint64_t stream) {
        return rng(splitmix64(seed + 0x7f4a7c15ULL * (stream + 1)));
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal via Box-Muller (fixed algorithm, not std::normal_distribution).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

    vec3 gaussian_vec3(double sigma) {
        return {gaussian() * sigma, gaussian() * sigma, gaussian() * sigma};
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Rotation matrix drawn uniformly from the rotation group (Shoemake's
/// uniform-quaternion construction).
inline mat3 random_rotation(rng& r) {
    const double u1 = r.uniform();
    const double u2 = r.uniform();
    const double u3 = r.uniform();
    const double two_pi = 2.0 * std::numbers::pi;
    const double qx = std::sqrt(1.0 - u1) * std::sin(two_pi * u2);
    const double qy = std::sqrt(1.0 - u1) * std::cos(two_pi * u2);
    const double qz = std::sqrt(u1) * std::sin(two_pi * u3);
    const double qw = std::sqrt(u1) * std::cos(two_pi * u3);

    mat3 out;
    out.m = {1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw),     2 * (qx * qz + qy * qw),
             2 * (qx * qy + qz * qw),     1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qx * qw),
             2 * (qx * qz - qy * qw),     2 * (qy * qz + qx * qw),     1 - 2 * (qx * qx + qy * qy)};
    return out;
}

}  // namespace pimu
