// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tracelab/matrix.hpp"
#include "tracelab/sim/leakage.hpp"

namespace tracelab::cpa {

enum class SelectionKind {
    aes_sbox,   // SBOX(p[b] ^ g)
    aes_xor,    // p[b] ^ g
    speck_r1,   // byte b of T ^ g,  T = ROR(PT1,8) + PT2
    speck_r2,   // byte b of U ^ g,  U = ROR(R1,8) + y1 computed with phase-1 K2
};

// The selection function I = f(d, k): the targeted intermediate as a
// function of known data and one subkey byte.  speck_r2 needs the K2
// recovered by phase 1 to compute its key-independent operand.
struct SelectionModel {
    SelectionKind kind = SelectionKind::aes_sbox;
    std::optional<std::uint64_t> k2;
};

std::uint8_t apply_selection(const SelectionModel& model, const Block128& plaintext,
                             unsigned guess, unsigned byte_index);

// N x 256 hypothetical power values: h(i, g) = HW(selection(d_i, g)).
Matrix build_hypotheses(const sim::TraceSet& set, const SelectionModel& model,
                        unsigned byte_index);

// guesses x samples Pearson estimates; entries whose trace column or guess
// column has zero variance are undefined and stored as NaN.
struct CorrelationMatrix {
    Matrix c;
    std::size_t guesses() const { return c.rows(); }
    std::size_t samples() const { return c.cols(); }
    bool defined(std::size_t g, std::size_t j) const;
};

// Single pass over traces in ascending index order, accumulating
// sum(W), sum(W^2), sum(H), sum(H^2) and sum(WH); the accumulation order is
// the canonical target that any parallel variant must reproduce to 1e-9.
CorrelationMatrix pearson_correlate(const Matrix& w, const Matrix& h);
CorrelationMatrix pearson_correlate(const sim::TraceSet& set, const Matrix& h);

struct GuessScore {
    unsigned guess = 0;
    double score = -1.0;        // max |rho| over defined samples; -1 if none defined
    std::size_t peak_time = 0;  // sample index attaining the peak
    double signed_peak = 0.0;   // rho value at peak_time, sign preserved
};

// All 256 guesses sorted by descending peak score.  Scores tying within
// 1e-9 are ordered positive-peak first, then by the smaller guess value:
// pure-xor selections give the complement guess an exactly anti-correlated
// hypothesis, so |rho| alone cannot separate g from g^0xFF.  The gap is the
// best score minus the best strictly lower score; entries tying the top are
// polarity mirrors, not competing hypotheses.
struct KeyRanking {
    std::vector<GuessScore> entries;
    double gap = 0.0;

    unsigned best() const { return entries.front().guess; }
    const GuessScore& of_guess(unsigned guess) const;
};

KeyRanking rank_guesses(const CorrelationMatrix& c);

KeyRanking attack_byte(const sim::TraceSet& set, const SelectionModel& model,
                       unsigned byte_index);

// Peak |rho| per guess after each prefix of traces in the grid, computed
// with one incremental pass.
struct SweepTrajectory {
    std::vector<std::size_t> counts;
    Matrix peak_scores;  // grid point x 256, -1 where nothing was defined
    Matrix peak_signed;  // rho at each peak, sign preserved
};

SweepTrajectory sweep_traces(const sim::TraceSet& set, const SelectionModel& model,
                             unsigned byte_index, const std::vector<std::size_t>& grid);

// Smallest grid count from which the true byte ranks first at every grid
// point onward; nullopt when the ranking never stabilises within the grid.
std::optional<std::size_t> minimal_stable_traces(const sim::TraceSet& set,
                                                 const SelectionModel& model,
                                                 unsigned byte_index,
                                                 const std::vector<std::size_t>& grid,
                                                 std::uint8_t true_byte);
std::optional<std::size_t> minimal_stable_traces(const SweepTrajectory& sweep,
                                                 std::uint8_t true_byte);

// Geometric grid from lo to hi inclusive; default_grid uses 1.25x steps.
std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, double step);
std::vector<std::size_t> default_grid(std::size_t lo, std::size_t hi);

}  // namespace tracelab::cpa
