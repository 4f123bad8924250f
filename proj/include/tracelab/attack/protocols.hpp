// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tracelab/cpa/engine.hpp"
#include "tracelab/sim/leakage.hpp"

namespace tracelab::attack {

struct AttackReport {
    sim::CipherId cipher = sim::CipherId::aes128;
    std::vector<cpa::KeyRanking> lanes;       // one ranking per attacked lane
    std::vector<std::uint8_t> recovered_key;  // 16 bytes
    std::vector<double> gaps;                 // per lane
    std::optional<bool> success;              // only when a true key was supplied
    std::vector<std::size_t> traces_used;     // per collection phase
    double seconds = 0.0;
    std::string invocation;  // flag set that reproduces the run

    // Fixed-width table: one column per lane, ranked guesses downward.
    std::string render_text(std::size_t top = 5) const;
    std::string render_csv() const;
};

// 16 independent first-round sbox attacks; best guesses concatenate to the key.
AttackReport attack_aes(const sim::TraceSet& set,
                        std::optional<Block128> true_key = std::nullopt);

// Phase 1: 8 lane attacks with the R1 selection over the M1 window; lanes
// assemble K2 least-significant lane first.
std::uint64_t attack_speck_phase1(const sim::TraceSet& set);

struct SpeckPhase2Result {
    std::uint64_t k_prime = 0;
    std::uint64_t k1 = 0;
    double median_gap = 0.0;
    bool low_confidence = false;  // median lane gap below threshold
    std::vector<cpa::KeyRanking> lanes;
};

// Phase 2: R2 selection using the phase-1 K2, then the schedule step is
// inverted to recover K1.  A wrong K2 context shows up as low lane gaps.
SpeckPhase2Result attack_speck_phase2(const sim::TraceSet& set, std::uint64_t k2,
                                      double gap_threshold = 0.05);

// Phase 1 then phase 2; recovered key is K1 || K2 in presentation order.
AttackReport attack_speck_full(const sim::TraceSet& phase1, const sim::TraceSet& phase2,
                               std::optional<Block128> true_key = std::nullopt);

struct ZeroKeyDiagnostic {
    // Attack over the operand-load region of the with-loads set: the
    // condition under which the CPA reports an all-zero key.
    std::vector<std::uint8_t> top_with_loads;
    // Attack over the full with-loads window, where the plaintext-load and
    // AddRoundKey-store peaks compete.
    std::vector<std::uint8_t> top_full_window;
    // Attack on the paired set without plaintext loads.
    std::vector<std::uint8_t> top_without_loads;
    // Peak sample index of guess 0 and of the true key in the full window;
    // the guess-0 peak sits in the earlier load region.
    std::vector<std::size_t> zero_peak_time;
    std::vector<std::size_t> true_peak_time;
    std::size_t lanes_topped_by_zero = 0;     // in top_with_loads
    std::size_t lanes_topped_by_true = 0;     // in top_without_loads, needs true key
};

// Reproduces the xor-selection anomaly on paired AES sets that differ only
// in whether plaintext loads fall inside the capture window.
ZeroKeyDiagnostic zero_key_diagnostic(const sim::TraceSet& with_loads,
                                      const sim::TraceSet& without_loads,
                                      std::optional<Block128> true_key = std::nullopt);

enum class CountermeasureAxis { injection, shuffle, lowpass, noise };

const char* to_string(CountermeasureAxis axis);

struct ExperimentConfig {
    sim::SynthConfig base;          // countermeasure fields of the axis are overridden
    cpa::SelectionModel model;      // selection used for the repeated attacks
    unsigned byte_index = 0;
    std::size_t budget = 4000;      // traces synthesized per cell
    std::vector<std::size_t> grid;  // defaults to default_grid(8, budget)
};

struct ExperimentCell {
    double level = 0.0;
    std::uint64_t seed = 0;
    std::optional<std::size_t> min_traces;  // nullopt = not reached within budget
};

struct CountermeasureTable {
    CountermeasureAxis axis = CountermeasureAxis::injection;
    std::vector<double> levels;
    std::vector<std::optional<std::size_t>> medians;  // per level, across seeds
    std::vector<ExperimentCell> cells;

    std::string render_csv() const;
};

// For each level and seed: synthesize a set with the axis set to the level
// (seeds are shared across levels so comparisons are paired) and measure
// minimal_stable_traces; aggregate the median per level.
CountermeasureTable countermeasure_experiment(const ExperimentConfig& config,
                                              CountermeasureAxis axis,
                                              const std::vector<double>& levels,
                                              const std::vector<std::uint64_t>& seeds);

}  // namespace tracelab::attack
