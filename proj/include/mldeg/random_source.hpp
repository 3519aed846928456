#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include "mldeg/rational.hpp"

namespace mldeg {

/// Ranges for random exact coefficients: numerator uniform in
/// [-kNumeratorBound, kNumeratorBound], denominator uniform in [1, kDenominatorBound].
inline constexpr std::int64_t kNumeratorBound = 1'000'000;
inline constexpr std::int64_t kDenominatorBound = 1'000;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Seeded, splittable random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not, so every draw below is
/// derived from raw 64-bit outputs; identical (seed, stream) pairs therefore
/// produce identical draws on every platform.
///
/// Consumers never share a generator: each one derives its own stream with
/// derive(), keyed by a stable label.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream),
          engine_(detail::splitmix64(seed) ^ detail::splitmix64(stream + 0x632be59bd9b4e019ULL)) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Independent child stream; does not advance this source.
    RandomSource derive(std::uint64_t label) const {
        return RandomSource(seed_, detail::splitmix64(stream_ * 0x9e3779b97f4a7c15ULL + label + 1));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [lo, hi], unbiased (rejection sampling).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next_u64()); // full 64-bit range
        // Reject the lowest (2^64 mod span) outputs so the remainder is uniform.
        const std::uint64_t threshold = (0 - span) % span;
        std::uint64_t r = next_u64();
        while (r < threshold) r = next_u64();
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + r % span);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform point on the complex unit circle.
    std::complex<double> unit_complex() {
        const double angle = 2.0 * std::numbers::pi * uniform01();
        return {std::cos(angle), std::sin(angle)};
    }

    /// Complex number with real and imaginary parts uniform in [-1, 1).
    std::complex<double> complex_box() {
        const double re = 2.0 * uniform01() - 1.0;
        const double im = 2.0 * uniform01() - 1.0;
        return {re, im};
    }

    /// Exact rational with numerator in [-1e6, 1e6] and denominator in [1, 1e3].
    Rational rational() {
        const std::int64_t num = uniform_int(-kNumeratorBound, kNumeratorBound);
        const std::int64_t den = uniform_int(1, kDenominatorBound);
        return make_rational(static_cast<long>(num), static_cast<unsigned long>(den));
    }

    /// Same ranges as rational(), excluding zero.
    Rational nonzero_rational() {
        for (;;) {
            Rational q = rational();
            if (q != 0) return q;
        }
    }

    /// k / 1000 with |k| uniform in [100, 1000] and a random sign: generic
    /// data whose entries stay within one order of magnitude.
    Rational balanced_rational() {
        const auto k = uniform_int(100, 1000);
        const long signed_k = uniform_int(0, 1) == 0 ? static_cast<long>(k) : -static_cast<long>(k);
        return make_rational(signed_k, 1000);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

} // namespace mldeg
