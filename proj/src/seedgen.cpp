// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/rng/seedgen.hpp"

#include <algorithm>
#include <cmath>

#include "tracelab/errors.hpp"

namespace tracelab::rng {

std::uint64_t AdcWordSource::next_word() {
    if (bits < 1 || bits > 16) throw config_error("ADC resolution must be 1..16 bits");
    double g = stream.next_gaussian();
    double clipped = std::max(0.0, g);
    // the amplifier gain is huge, so the converter's full scale sits well
    // inside the noise distribution and the signal regularly rails at both
    // ends; 1.5 sigma keeps every bit's bias small enough for a 10-value fold
    const double full_scale = 1.5;
    auto q = static_cast<std::uint64_t>(clipped / full_scale * static_cast<double>(1u << bits));
    return std::min<std::uint64_t>(q, (1u << bits) - 1);
}

std::uint64_t assemble_seed_from_bits(BiasedBitSource& source, unsigned n, unsigned m) {
    if (n < 1 || n > 64 || m < 1) throw config_error("seed bits must be 1..64 and folds >= 1");
    if (source.p < 0.0 || source.p > 1.0) throw config_error("bit bias p must be in [0, 1]");
    std::uint64_t folded = 0;
    for (unsigned rep = 0; rep < m; ++rep) {
        std::uint64_t value = 0;
        for (unsigned i = 0; i < n; ++i)
            value |= static_cast<std::uint64_t>(source.next_bit()) << i;
        folded ^= value;
    }
    return folded;
}

std::uint64_t assemble_seed_from_adc(AdcWordSource& source, unsigned n, unsigned m) {
    if (n < 1 || n > 64 || m < 1) throw config_error("seed bits must be 1..64 and folds >= 1");
    const unsigned k = source.bits;
    const unsigned words = (n + k - 1) / k;
    const std::uint64_t mask = n == 64 ? ~0ull : (1ull << n) - 1;
    std::uint64_t folded = 0;
    for (unsigned rep = 0; rep < m; ++rep) {
        std::uint64_t value = 0;
        for (unsigned w = 0; w < words; ++w) value |= source.next_word() << (w * k);
        folded ^= value & mask;
    }
    return folded;
}

double folded_bit_probability(double p, unsigned m) {
    return (1.0 - std::pow(1.0 - 2.0 * p, static_cast<double>(m))) / 2.0;
}

}  // namespace tracelab::rng
