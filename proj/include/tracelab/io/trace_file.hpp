// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "tracelab/sim/leakage.hpp"

namespace tracelab::io {

// Trace-set container, all integers little-endian:
//   magic   'S' 'C' 'A' 'T'
//   version u16 = 1
//   cipher  u8  (0 = AES-128, 1 = Speck phase 1, 2 = Speck phase 2)
//   datalen u16 = 16
//   ntraces u32
//   nsamples u32
// then per trace: 16 plaintext octets followed by nsamples binary32 samples.
// Keys are never stored; a trace file is exactly what an attacker holds.
void write_trace_set(const sim::TraceSet& set, const std::string& path);
sim::TraceSet read_trace_set(const std::string& path);

}  // namespace tracelab::io
