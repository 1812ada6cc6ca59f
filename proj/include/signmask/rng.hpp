// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace signmask {

/// 64-bit FNV-1a. Used for clip-id and stream-name seed mixing; the constants
/// are part of the on-disk determinism contract (SMSK version 1).
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Portable seeded generator: std::mt19937_64 (whose output sequence is fixed
/// by the standard) seeded through splitmix64, with integer reduction done
/// here rather than by std::uniform_int_distribution, whose algorithm is
/// implementation-defined.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
    Rng(std::uint64_t seed, std::uint64_t stream_tag) : Rng(seed ^ stream_tag) {}

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound)
    {
        // Rejection sampling on the top of the range keeps the draw exactly uniform.
        const std::uint64_t limit = engine_type::max() - (engine_type::max() % bound + 1) % bound;
        std::uint64_t draw = engine_();
        while (draw > limit) {
            draw = engine_();
        }
        return draw % bound;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    engine_type& engine() noexcept { return engine_; }

private:
    engine_type engine_;
};

}  // namespace signmask
