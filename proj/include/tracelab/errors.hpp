// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tracelab {

// Bad flag/parameter combinations (unknown profile, lambda out of range, ...).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operands that do not fit together (limb width/length mismatch, rotate count).
class invalid_operand_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unparseable input: bad magic, bad version, malformed hex.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structurally valid header but payload does not match; carries the byte
// offset at which the mismatch was detected.
class corruption_error : public std::runtime_error {
public:
    corruption_error(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Data that cannot support the requested statistic (all-constant traces,
// every correlation entry undefined).
class degenerate_data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Too few samples for the requested test.
class insufficient_data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tracelab
