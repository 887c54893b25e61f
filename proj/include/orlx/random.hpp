#pragma once

// Seeded, splittable random number generation.
//
// All distribution transforms are implemented directly on top of a
// xoshiro256++ engine so that a (seed, stream) pair produces bit-identical
// sequences on every platform; the standard-library distributions make no
// such guarantee.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "orlx/orlicz.hpp"

namespace orlx {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// Identifies a reproducible random stream. Equal (seed, stream) pairs give
/// identical sample sequences; distinct streams are statistically independent.
struct SeedSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Derived substream i; nested derivations stay collision-free in practice
    /// (64-bit mixed indices).
    SeedSpec child(std::uint64_t i) const {
        return SeedSpec{seed, detail::mix64(detail::mix64(stream + 0x632BE59BD9B4E019ull) ^
                                            (i + 0x9E3779B97F4A7C15ull))};
    }
    bool operator==(const SeedSpec&) const = default;
};

/// xoshiro256++ engine keyed by a SeedSpec via splitmix64 expansion.
class RandomEngine {
public:
    explicit RandomEngine(SeedSpec spec) : spec_(spec) {
        std::uint64_t z = spec.seed ^ detail::mix64(spec.stream * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
        for (auto& w : s_) {
            z += 0x9E3779B97F4A7C15ull;
            std::uint64_t r = z;
            r = (r ^ (r >> 30)) * 0xBF58476D1CE4E5B9ull;
            r = (r ^ (r >> 27)) * 0x94D049BB133111EBull;
            w = r ^ (r >> 31);
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    SeedSpec spec() const { return spec_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl64(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard exponential, inverse CDF.
    double exponential() { return -std::log1p(-uniform01()); }

    /// Standard normal, Box-Muller (one variate per call).
    double gaussian() {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Standard Cauchy.
    double cauchy() { return std::tan(M_PI * (uniform01() - 0.5)); }

    /// Symmetric p-stable via Chambers-Mallows-Stuck, 1 <= p <= 2.
    /// Conventions: p = 1 is standard Cauchy; p = 2 is Gaussian with variance 2.
    double p_stable(double p) {
        if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("p_stable: require 1 <= p <= 2");
        const double theta = M_PI * (uniform01() - 0.5);
        if (std::abs(p - 1.0) < 1e-12) return std::tan(theta);
        double w = exponential();
        if (w < 1e-300) w = 1e-300;
        const double ct = std::cos(theta);
        return std::sin(p * theta) / std::pow(ct, 1.0 / p) *
               std::pow(std::cos((1.0 - p) * theta) / w, (1.0 - p) / p);
    }

private:
    SeedSpec spec_;
    std::uint64_t s_[4];
};

/// n positive draws with CDF 1 - exp(-G(t)), i.e. G^{-1}(E) for E ~ Exp(1).
inline Eigen::VectorXd sample_generalized_exponential(const OrliczFunction& G, RandomEngine& rng,
                                                      Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("sample_generalized_exponential: n >= 1 required");
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = G.inverse(rng.exponential());
    return out;
}

/// n i.i.d. symmetric p-stable draws (CMS parameterization).
inline Eigen::VectorXd sample_p_stable(double p, RandomEngine& rng, Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("sample_p_stable: n >= 1 required");
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = rng.p_stable(p);
    return out;
}

}  // namespace orlx
