// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace tracelab::cipher {

inline std::uint64_t ror64(std::uint64_t x, unsigned r) {
    r &= 63;
    return r == 0 ? x : (x >> r) | (x << (64 - r));
}
inline std::uint64_t rol64(std::uint64_t x, unsigned r) {
    r &= 63;
    return r == 0 ? x : (x << r) | (x >> (64 - r));
}

// Speck-128/128: 32 rounds, two 64-bit key words.  round_keys[0] is K2
// verbatim; round_keys[1] is the round key K' recovered by phase 2.
struct SpeckKeySchedule {
    std::array<std::uint64_t, 32> round_keys;
};

SpeckKeySchedule speck_key_schedule(std::uint64_t k1, std::uint64_t k2);

// 32 rounds of x = (ROR(x,8) + y) ^ rk; y = ROL(y,3) ^ x.
std::pair<std::uint64_t, std::uint64_t>
speck128_encrypt(std::uint64_t pt1, std::uint64_t pt2, const SpeckKeySchedule& schedule);

// Same cipher run on the byte-array backend (limb_width 8 or 16), as a
// narrow-register compiler would emit it.  Must agree with the native path.
std::pair<std::uint64_t, std::uint64_t>
speck128_encrypt_limbs(std::uint64_t pt1, std::uint64_t pt2,
                       const SpeckKeySchedule& schedule, unsigned limb_width);

// Inverts the first key-schedule step:
//   K1 = ROL(((K' ^ ROL(K2,3)) - K2) mod 2^64, 8)
// Wrapping subtraction absorbs the borrow case where the intermediate is
// smaller than K2.
std::uint64_t recover_k1(std::uint64_t k_prime, std::uint64_t k2);

// Round-1 bus values: t = ROR(pt1,8) + pt2 (key independent),
// r1 = t ^ k2, y1 = ROL(pt2,3) ^ r1.
struct SpeckRound1Values {
    std::uint64_t t;
    std::uint64_t r1;
    std::uint64_t y1;
};
SpeckRound1Values speck_round1_values(std::uint64_t pt1, std::uint64_t pt2, std::uint64_t k2);

// Round-2 add result u = ROR(r1,8) + y1; the round-2 intermediate written
// to memory is R2 = u ^ K'.
std::uint64_t speck_round2_target(std::uint64_t r1, std::uint64_t y1);

}  // namespace tracelab::cipher
