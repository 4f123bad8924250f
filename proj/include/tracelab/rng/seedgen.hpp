// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "tracelab/rng/prng.hpp"

namespace tracelab::rng {

// Simulated digitized noise pulse train: each sample is a single bit that
// is 1 with probability p.  Stands in for the schmitt-trigger output whose
// zero level dominates heavily.
struct BiasedBitSource {
    double p = 0.02;  // probability of reading a 1
    Stream stream;

    unsigned next_bit() { return stream.next_double() < p ? 1u : 0u; }
};

// Simulated ADC sampling of an amplified noise signal whose negative half
// is clipped to zero: word = quantize(max(0, N(0,1)) / full_scale) with
// full scale at 3 sigma.  Roughly half the words read zero, biasing every
// bit toward 0 until the XOR fold removes it.
struct AdcWordSource {
    unsigned bits = 10;  // k, resolution of the converter (1..16)
    Stream stream;

    std::uint64_t next_word();
};

// Takes n single-bit samples, packs them LSB-first into an n-bit value,
// repeats m times and XOR-folds the m values into the returned seed.
std::uint64_t assemble_seed_from_bits(BiasedBitSource& source, unsigned n, unsigned m);

// Draws ceil(n/k) k-bit words, concatenates them LSB-first, truncates to the
// low n bits; repeats m times and XOR-folds.
std::uint64_t assemble_seed_from_adc(AdcWordSource& source, unsigned n, unsigned m);

// Bias of a single folded bit: folding m independent bits of bias p gives
// P(1) = (1 - (1 - 2p)^m) / 2.
double folded_bit_probability(double p, unsigned m);

}  // namespace tracelab::rng
