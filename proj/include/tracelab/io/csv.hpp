// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tracelab/cpa/engine.hpp"

namespace tracelab::io {

// One row per guess, header row with sample indices.
std::string correlation_csv(const cpa::CorrelationMatrix& c);

// One row per guess, header row with grid counts.
std::string sweep_csv(const cpa::SweepTrajectory& sweep);

std::string histogram_csv(std::span<const std::uint64_t> counts);
std::string spectrum_csv(std::span<const double> magnitudes);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tracelab::io
