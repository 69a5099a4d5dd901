#pragma once

/**
 * @file rng.hpp
 * @brief Seeded, named random source with platform-independent draws.
 *
 * std::mt19937_64 output is fixed by the standard, but the <random>
 * distributions are not, so draws are derived from raw words here.
 */

#include <cstdint>
#include <random>
#include <string_view>

#include "circbias/rational.hpp"

namespace circbias {

class Rng {
public:
    static constexpr std::string_view name = "mt19937_64";

    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] (inclusive), rejection sampled.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(engine_());
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do { x = engine_(); } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    /// Random rational in [0,1) with denominator drawn from [1, max_den].
    Rational uniform_rational(std::int64_t max_den) {
        const std::int64_t den = uniform_int(1, max_den);
        return Rational(uniform_int(0, den - 1), den);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace circbias
