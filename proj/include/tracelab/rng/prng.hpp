// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>

namespace tracelab::rng {

// All simulation randomness flows through this generator so that every
// artifact is reproducible from (seed, stream purpose, stream index).
//
// Recurrence (xorshift-multiply, shift triple 12/25/27):
//   s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;
//   output = s * 2685821657736338717
// State 0 is a fixed point of the recurrence, so seed 0 is remapped to a
// fixed nonzero constant.
struct GeneratorState {
    std::uint64_t state = 1;
};

GeneratorState seed_state(std::uint64_t seed);

// Pure step: returns (output value, successor state).
std::pair<std::uint64_t, GeneratorState> prng_next(GeneratorState s);

// Derives an independent substream state from (seed, purpose, index) via two
// rounds of the splitmix64 finalizer over golden-gamma increments.  Streams
// for distinct (purpose, index) pairs are statistically independent, which
// makes trace synthesis parallelizable and order-insensitive.
GeneratorState derive_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index);

// Stream purposes used by the simulator.
inline constexpr std::uint64_t kStreamTrace = 0;      // per-trace noise + countermeasures
inline constexpr std::uint64_t kStreamPlaintext = 1;  // plaintext generation
inline constexpr std::uint64_t kStreamSeedSource = 2; // randomness-pipeline sources

// Stateful convenience wrapper around the pure recurrence.
class Stream {
public:
    Stream() = default;
    explicit Stream(GeneratorState s) : s_(s) {}

    std::uint64_t next_u64() {
        auto [v, next] = prng_next(s_);
        s_ = next;
        return v;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in {0, ..., n-1}; modulo bias is below 2^-53 for the n used here.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via the Box-Muller transform, one deviate per call:
    //   u1 = ((bits1 >> 11) + 1) * 2^-53   in (0, 1]
    //   u2 =  (bits2 >> 11)      * 2^-53   in [0, 1)
    //   z  = sqrt(-2 ln u1) * cos(2 pi u2)
    // The sine twin is discarded; two generator draws per deviate.
    double next_gaussian();

    GeneratorState state() const { return s_; }

private:
    GeneratorState s_;
};

}  // namespace tracelab::rng
