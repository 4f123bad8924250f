// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace tracelab::cipher {

// A 64-bit unsigned integer as a narrow-register compiler would hold it:
// an array of 8-bit or 16-bit limbs with the MOST significant limb at
// index 0 (0x0706050403020100 with 8-bit limbs is {07,06,...,01,00}).
struct LimbInt {
    std::vector<std::uint16_t> limbs;  // each entry < 2^limb_width
    unsigned limb_width = 8;           // 8 or 16

    static LimbInt from_word(std::uint64_t v, unsigned limb_width);
    std::uint64_t to_word() const;
};

// (a + b) mod 2^64: ripple-carry from the least significant limb upward;
// the carry out of limb 0 is dropped.
LimbInt limb_add(const LimbInt& a, const LimbInt& b);

// Limb-wise XOR; no inter-limb dependence.
LimbInt limb_xor(const LimbInt& a, const LimbInt& b);

enum class RotateDirection { left, right };

// Bitwise rotation by r in [0, 64): whole-limb shift by r / width slots,
// then an intra-limb shift by r % width with overflow bits carried into the
// adjacent limb, then OR of the two shifted intermediates.
LimbInt limb_rotate(const LimbInt& a, unsigned r, RotateDirection direction);

}  // namespace tracelab::cipher
