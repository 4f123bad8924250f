// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "tracelab/hex.hpp"

namespace tracelab::cipher {

extern const std::array<std::uint8_t, 256> AES_SBOX;

// Full 10-round AES-128 encryption of one block.
Block128 aes128_encrypt(const Block128& plaintext, const Block128& key);

// First-round intermediates targeted by the attack: the AddRoundKey output
// ark[i] = p[i] ^ k[i] and the SubBytes output sbox_out[i] = SBOX(ark[i]).
struct AesRound1Taps {
    Block128 ark;
    Block128 sbox_out;
};
AesRound1Taps aes_round1_intermediates(const Block128& plaintext, const Block128& key);

}  // namespace tracelab::cipher
