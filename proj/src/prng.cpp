// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/rng/prng.hpp"

#include <cmath>
#include <numbers>

namespace tracelab::rng {

namespace {

constexpr std::uint64_t kMultiplier = 2685821657736338717ull;
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kZeroSeedSubstitute = kGamma;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

GeneratorState seed_state(std::uint64_t seed) {
    return GeneratorState{seed == 0 ? kZeroSeedSubstitute : seed};
}

std::pair<std::uint64_t, GeneratorState> prng_next(GeneratorState s) {
    std::uint64_t x = s.state;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    return {x * kMultiplier, GeneratorState{x}};
}

GeneratorState derive_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    std::uint64_t s = mix64(seed + kGamma * (purpose + 1));
    s = mix64(s + kGamma * (index + 1));
    return seed_state(s);
}

double Stream::next_gaussian() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace tracelab::rng
