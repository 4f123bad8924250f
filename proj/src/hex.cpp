// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/hex.hpp"

#include <cctype>

#include "tracelab/errors.hpp"

namespace tracelab {

namespace {

int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

constexpr char kDigits[] = "0123456789abcdef";

}  // namespace

std::vector<std::uint8_t> parse_hex(std::string_view text) {
    std::vector<int> nibbles;
    nibbles.reserve(text.size());
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        int n = nibble(c);
        if (n < 0) throw format_error(std::string("invalid hex character '") + c + "'");
        nibbles.push_back(n);
    }
    if (nibbles.size() % 2 != 0) throw format_error("odd number of hex digits");
    std::vector<std::uint8_t> out(nibbles.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibbles[2 * i] << 4 | nibbles[2 * i + 1]);
    return out;
}

Block128 parse_hex_block(std::string_view text) {
    auto bytes = parse_hex(text);
    if (bytes.size() != 16)
        throw format_error("expected 16 bytes of hex, got " + std::to_string(bytes.size()));
    Block128 b;
    std::copy(bytes.begin(), bytes.end(), b.begin());
    return b;
}

std::string format_hex(const std::uint8_t* data, std::size_t len) {
    std::string s;
    s.reserve(2 * len);
    for (std::size_t i = 0; i < len; ++i) {
        s.push_back(kDigits[data[i] >> 4]);
        s.push_back(kDigits[data[i] & 0xf]);
    }
    return s;
}

std::string format_hex(const Block128& block) { return format_hex(block.data(), block.size()); }

std::string format_hex_u64(std::uint64_t v) {
    std::uint8_t bytes[8];
    word_to_bytes_be(v, bytes);
    return format_hex(bytes, 8);
}

std::uint64_t word_from_bytes_be(const std::uint8_t* bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | bytes[i];
    return v;
}

void word_to_bytes_be(std::uint64_t v, std::uint8_t* bytes) {
    for (int i = 7; i >= 0; --i) {
        bytes[i] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
}

std::pair<std::uint64_t, std::uint64_t> block_to_words(const Block128& b) {
    return {word_from_bytes_be(b.data()), word_from_bytes_be(b.data() + 8)};
}

Block128 words_to_block(std::uint64_t left, std::uint64_t right) {
    Block128 b;
    word_to_bytes_be(left, b.data());
    word_to_bytes_be(right, b.data() + 8);
    return b;
}

}  // namespace tracelab
