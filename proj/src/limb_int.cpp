// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/cipher/limb_int.hpp"

#include "tracelab/errors.hpp"

namespace tracelab::cipher {

namespace {

void check_width(unsigned limb_width) {
    if (limb_width != 8 && limb_width != 16)
        throw invalid_operand_error("limb width must be 8 or 16");
}

void check_same_shape(const LimbInt& a, const LimbInt& b) {
    if (a.limb_width != b.limb_width || a.limbs.size() != b.limbs.size())
        throw invalid_operand_error("limb operands have mismatched shapes");
}

// Logical shift right by whole limbs plus an intra-limb bit shift; the bits
// that fall out of a limb re-enter the limb below it (higher index).
LimbInt shift_right(const LimbInt& a, unsigned r) {
    const unsigned w = a.limb_width;
    const std::size_t n = a.limbs.size();
    const std::uint32_t mask = (1u << w) - 1;
    LimbInt out{std::vector<std::uint16_t>(n, 0), w};
    const unsigned limb_shift = r / w;
    const unsigned bit_shift = r % w;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t dst = i + limb_shift;  // index 0 is most significant
        if (dst >= n) continue;
        std::uint32_t v = static_cast<std::uint32_t>(a.limbs[i]) >> bit_shift;
        out.limbs[dst] |= static_cast<std::uint16_t>(v & mask);
        if (bit_shift != 0 && dst + 1 < n) {
            std::uint32_t carry = (static_cast<std::uint32_t>(a.limbs[i]) << (w - bit_shift)) & mask;
            out.limbs[dst + 1] |= static_cast<std::uint16_t>(carry);
        }
    }
    return out;
}

LimbInt shift_left(const LimbInt& a, unsigned r) {
    const unsigned w = a.limb_width;
    const std::size_t n = a.limbs.size();
    const std::uint32_t mask = (1u << w) - 1;
    LimbInt out{std::vector<std::uint16_t>(n, 0), w};
    const unsigned limb_shift = r / w;
    const unsigned bit_shift = r % w;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < limb_shift) continue;
        std::size_t dst = i - limb_shift;
        std::uint32_t v = (static_cast<std::uint32_t>(a.limbs[i]) << bit_shift) & mask;
        out.limbs[dst] |= static_cast<std::uint16_t>(v);
        if (bit_shift != 0 && dst > 0) {
            std::uint32_t carry = static_cast<std::uint32_t>(a.limbs[i]) >> (w - bit_shift);
            out.limbs[dst - 1] |= static_cast<std::uint16_t>(carry);
        }
    }
    return out;
}

}  // namespace

LimbInt LimbInt::from_word(std::uint64_t v, unsigned limb_width) {
    check_width(limb_width);
    const std::size_t n = 64 / limb_width;
    LimbInt out{std::vector<std::uint16_t>(n), limb_width};
    const std::uint64_t mask = (1u << limb_width) - 1;
    for (std::size_t i = 0; i < n; ++i)
        out.limbs[n - 1 - i] = static_cast<std::uint16_t>((v >> (i * limb_width)) & mask);
    return out;
}

std::uint64_t LimbInt::to_word() const {
    std::uint64_t v = 0;
    for (std::uint16_t limb : limbs) v = v << limb_width | limb;
    return v;
}

LimbInt limb_add(const LimbInt& a, const LimbInt& b) {
    check_same_shape(a, b);
    const std::uint32_t base = 1u << a.limb_width;
    LimbInt out{std::vector<std::uint16_t>(a.limbs.size()), a.limb_width};
    std::uint32_t carry = 0;
    for (std::size_t i = a.limbs.size(); i-- > 0;) {
        std::uint32_t s = static_cast<std::uint32_t>(a.limbs[i]) + b.limbs[i] + carry;
        out.limbs[i] = static_cast<std::uint16_t>(s % base);
        carry = s / base;
    }
    // carry out of the most significant limb is dropped, as in 64-bit addition
    return out;
}

LimbInt limb_xor(const LimbInt& a, const LimbInt& b) {
    check_same_shape(a, b);
    LimbInt out{std::vector<std::uint16_t>(a.limbs.size()), a.limb_width};
    for (std::size_t i = 0; i < a.limbs.size(); ++i) out.limbs[i] = a.limbs[i] ^ b.limbs[i];
    return out;
}

LimbInt limb_rotate(const LimbInt& a, unsigned r, RotateDirection direction) {
    check_width(a.limb_width);
    if (r >= 64) throw invalid_operand_error("rotate count must be in [0, 64)");
    if (r == 0) return a;
    const LimbInt& right_part = direction == RotateDirection::right ? shift_right(a, r) : shift_left(a, r);
    const LimbInt& wrap_part = direction == RotateDirection::right ? shift_left(a, 64 - r) : shift_right(a, 64 - r);
    LimbInt out{std::vector<std::uint16_t>(a.limbs.size()), a.limb_width};
    for (std::size_t i = 0; i < a.limbs.size(); ++i)
        out.limbs[i] = right_part.limbs[i] | wrap_part.limbs[i];
    return out;
}

}  // namespace tracelab::cipher
