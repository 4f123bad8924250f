// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/cipher/speck128.hpp"

#include "tracelab/cipher/limb_int.hpp"

namespace tracelab::cipher {

SpeckKeySchedule speck_key_schedule(std::uint64_t k1, std::uint64_t k2) {
    SpeckKeySchedule s;
    s.round_keys[0] = k2;
    std::uint64_t l = k1;
    for (unsigned i = 0; i + 1 < s.round_keys.size(); ++i) {
        // the round counter enters through the l word; the figure form of the
        // schedule omits it but the published test vectors require it
        l = (ror64(l, 8) + s.round_keys[i]) ^ i;
        s.round_keys[i + 1] = rol64(s.round_keys[i], 3) ^ l;
    }
    return s;
}

std::pair<std::uint64_t, std::uint64_t>
speck128_encrypt(std::uint64_t pt1, std::uint64_t pt2, const SpeckKeySchedule& schedule) {
    std::uint64_t x = pt1, y = pt2;
    for (std::uint64_t rk : schedule.round_keys) {
        x = (ror64(x, 8) + y) ^ rk;
        y = rol64(y, 3) ^ x;
    }
    return {x, y};
}

std::pair<std::uint64_t, std::uint64_t>
speck128_encrypt_limbs(std::uint64_t pt1, std::uint64_t pt2,
                       const SpeckKeySchedule& schedule, unsigned limb_width) {
    LimbInt x = LimbInt::from_word(pt1, limb_width);
    LimbInt y = LimbInt::from_word(pt2, limb_width);
    for (std::uint64_t rk : schedule.round_keys) {
        LimbInt k = LimbInt::from_word(rk, limb_width);
        x = limb_xor(limb_add(limb_rotate(x, 8, RotateDirection::right), y), k);
        y = limb_xor(limb_rotate(y, 3, RotateDirection::left), x);
    }
    return {x.to_word(), y.to_word()};
}

std::uint64_t recover_k1(std::uint64_t k_prime, std::uint64_t k2) {
    return rol64((k_prime ^ rol64(k2, 3)) - k2, 8);
}

SpeckRound1Values speck_round1_values(std::uint64_t pt1, std::uint64_t pt2, std::uint64_t k2) {
    SpeckRound1Values v;
    v.t = ror64(pt1, 8) + pt2;
    v.r1 = v.t ^ k2;
    v.y1 = rol64(pt2, 3) ^ v.r1;
    return v;
}

std::uint64_t speck_round2_target(std::uint64_t r1, std::uint64_t y1) {
    return ror64(r1, 8) + y1;
}

}  // namespace tracelab::cipher
