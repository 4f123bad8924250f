// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tracelab {

// A 128-bit block in presentation order: byte 0 is the first byte of the
// hex string, matching how keys are usually listed ("67 76 89 79 ...").
using Block128 = std::array<std::uint8_t, 16>;

// Parses lowercase/uppercase hex, optionally with spaces, into raw bytes.
// Throws format_error on odd length or non-hex characters.
std::vector<std::uint8_t> parse_hex(std::string_view text);

// Parses exactly 16 bytes of hex into a block.
Block128 parse_hex_block(std::string_view text);

// Lowercase hex, byte 0 first, no separators.
std::string format_hex(const std::uint8_t* data, std::size_t len);
std::string format_hex(const Block128& block);
std::string format_hex_u64(std::uint64_t v);

// Big-endian packing: block byte 0 is the most significant byte of the
// left word.  A Speck key block maps to (k1, k2) = (bytes 0..7, bytes 8..15)
// and a plaintext block to (pt1, pt2) likewise.
std::uint64_t word_from_bytes_be(const std::uint8_t* bytes);
void word_to_bytes_be(std::uint64_t v, std::uint8_t* bytes);

std::pair<std::uint64_t, std::uint64_t> block_to_words(const Block128& b);
Block128 words_to_block(std::uint64_t left, std::uint64_t right);

}  // namespace tracelab
