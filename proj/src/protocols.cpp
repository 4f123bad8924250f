// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/attack/protocols.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "tracelab/cipher/speck128.hpp"
#include "tracelab/errors.hpp"

namespace tracelab::attack {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double median_gap(const std::vector<cpa::KeyRanking>& lanes) {
    std::vector<double> gaps;
    gaps.reserve(lanes.size());
    for (const auto& lane : lanes) gaps.push_back(lane.gap);
    std::sort(gaps.begin(), gaps.end());
    const std::size_t n = gaps.size();
    return n % 2 == 1 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
}

std::uint64_t assemble_word(const std::vector<cpa::KeyRanking>& lanes) {
    std::uint64_t word = 0;
    for (std::size_t b = 0; b < 8; ++b)
        word |= static_cast<std::uint64_t>(lanes[b].best()) << (8 * b);
    return word;
}

}  // namespace

std::string AttackReport::render_text(std::size_t top) const {
    std::ostringstream os;
    if (!invocation.empty()) os << "# " << invocation << "\n";
    os << "lane    ";
    for (std::size_t lane = 0; lane < lanes.size(); ++lane) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "%5zu", lane);
        os << buf;
    }
    os << "\n";
    for (std::size_t r = 0; r < top; ++r) {
        os << "guess " << r << " ";
        for (const auto& lane : lanes) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "   %02X", lane.entries[r].guess);
            os << buf;
        }
        os << "\n        ";
        for (const auto& lane : lanes) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "%5.2f", std::max(0.0, lane.entries[r].score));
            os << buf;
        }
        os << "\n";
    }
    os << "gap     ";
    for (double g : gaps) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "%5.2f", g);
        os << buf;
    }
    os << "\nrecovered key: " << format_hex(recovered_key.data(), recovered_key.size());
    if (success) os << (*success ? "  [matches true key]" : "  [DOES NOT match true key]");
    os << "\ntraces:";
    for (std::size_t t : traces_used) os << " " << t;
    char buf[32];
    std::snprintf(buf, sizeof buf, "  time: %.2fs", seconds);
    os << buf << "\n";
    return os.str();
}

std::string AttackReport::render_csv() const {
    std::ostringstream os;
    os << "lane,rank,guess,score,peak_time\n";
    for (std::size_t lane = 0; lane < lanes.size(); ++lane)
        for (std::size_t r = 0; r < lanes[lane].entries.size(); ++r) {
            const auto& e = lanes[lane].entries[r];
            os << lane << ',' << r << ',' << static_cast<unsigned>(e.guess) << ','
               << e.score << ',' << e.peak_time << "\n";
        }
    return os.str();
}

AttackReport attack_aes(const sim::TraceSet& set, std::optional<Block128> true_key) {
    const auto start = Clock::now();
    AttackReport report;
    report.cipher = sim::CipherId::aes128;
    report.traces_used = {set.traces.size()};
    cpa::SelectionModel model{cpa::SelectionKind::aes_sbox, std::nullopt};
    for (unsigned b = 0; b < 16; ++b) {
        report.lanes.push_back(cpa::attack_byte(set, model, b));
        report.gaps.push_back(report.lanes.back().gap);
        report.recovered_key.push_back(static_cast<std::uint8_t>(report.lanes.back().best()));
    }
    if (true_key)
        report.success = std::equal(true_key->begin(), true_key->end(),
                                    report.recovered_key.begin());
    report.seconds = elapsed_seconds(start);
    return report;
}

std::uint64_t attack_speck_phase1(const sim::TraceSet& set) {
    cpa::SelectionModel model{cpa::SelectionKind::speck_r1, std::nullopt};
    std::vector<cpa::KeyRanking> lanes;
    for (unsigned b = 0; b < 8; ++b) lanes.push_back(cpa::attack_byte(set, model, b));
    return assemble_word(lanes);
}

SpeckPhase2Result attack_speck_phase2(const sim::TraceSet& set, std::uint64_t k2,
                                      double gap_threshold) {
    cpa::SelectionModel model{cpa::SelectionKind::speck_r2, k2};
    SpeckPhase2Result r;
    for (unsigned b = 0; b < 8; ++b) r.lanes.push_back(cpa::attack_byte(set, model, b));
    r.k_prime = assemble_word(r.lanes);
    r.k1 = cipher::recover_k1(r.k_prime, k2);
    r.median_gap = median_gap(r.lanes);
    r.low_confidence = r.median_gap < gap_threshold;
    return r;
}

AttackReport attack_speck_full(const sim::TraceSet& phase1, const sim::TraceSet& phase2,
                               std::optional<Block128> true_key) {
    const auto start = Clock::now();
    cpa::SelectionModel m1{cpa::SelectionKind::speck_r1, std::nullopt};
    std::vector<cpa::KeyRanking> lanes1;
    for (unsigned b = 0; b < 8; ++b) lanes1.push_back(cpa::attack_byte(phase1, m1, b));
    const std::uint64_t k2 = assemble_word(lanes1);
    SpeckPhase2Result p2 = attack_speck_phase2(phase2, k2);

    AttackReport report;
    report.cipher = sim::CipherId::speck128_phase1;
    report.traces_used = {phase1.traces.size(), phase2.traces.size()};
    for (const auto& lane : lanes1) {
        report.lanes.push_back(lane);
        report.gaps.push_back(lane.gap);
    }
    for (const auto& lane : p2.lanes) {
        report.lanes.push_back(lane);
        report.gaps.push_back(lane.gap);
    }
    Block128 key = words_to_block(p2.k1, k2);  // K1 high half, K2 low half
    report.recovered_key.assign(key.begin(), key.end());
    if (true_key)
        report.success = std::equal(true_key->begin(), true_key->end(),
                                    report.recovered_key.begin());
    report.seconds = elapsed_seconds(start);
    return report;
}

ZeroKeyDiagnostic zero_key_diagnostic(const sim::TraceSet& with_loads,
                                      const sim::TraceSet& without_loads,
                                      std::optional<Block128> true_key) {
    if (with_loads.traces.size() != without_loads.traces.size())
        throw config_error("zero-key sets are not paired: trace counts differ");
    if (!with_loads.meta.known || !without_loads.meta.known)
        throw config_error("zero-key diagnostic needs synthetic sets with metadata");
    if (!with_loads.meta.profile.include_plaintext_loads ||
        without_loads.meta.profile.include_plaintext_loads)
        throw config_error("zero-key sets must differ exactly in plaintext-load inclusion");
    for (std::size_t i = 0; i < with_loads.traces.size(); ++i)
        if (with_loads.traces[i].plaintext != without_loads.traces[i].plaintext)
            throw config_error("zero-key sets are not paired: plaintexts differ");

    // The operand loads occupy the first 16 event slots of the with-loads
    // window; their columns are fixed by the synthesis geometry.
    const auto& noise = with_loads.meta.noise;
    const std::size_t load_end = noise.slot_column(16);
    sim::TraceSet load_region = sim::slice_columns(with_loads, 0, load_end);

    cpa::SelectionModel model{cpa::SelectionKind::aes_xor, std::nullopt};
    ZeroKeyDiagnostic d;
    for (unsigned b = 0; b < 16; ++b) {
        auto loads_rank = cpa::attack_byte(load_region, model, b);
        auto full_rank = cpa::attack_byte(with_loads, model, b);
        auto bare_rank = cpa::attack_byte(without_loads, model, b);
        d.top_with_loads.push_back(static_cast<std::uint8_t>(loads_rank.best()));
        d.top_full_window.push_back(static_cast<std::uint8_t>(full_rank.best()));
        d.top_without_loads.push_back(static_cast<std::uint8_t>(bare_rank.best()));
        d.zero_peak_time.push_back(full_rank.of_guess(0).peak_time);
        if (d.top_with_loads.back() == 0) ++d.lanes_topped_by_zero;
        if (true_key) {
            d.true_peak_time.push_back(full_rank.of_guess((*true_key)[b]).peak_time);
            if (d.top_without_loads.back() == (*true_key)[b]) ++d.lanes_topped_by_true;
        }
    }
    return d;
}

const char* to_string(CountermeasureAxis axis) {
    switch (axis) {
        case CountermeasureAxis::injection: return "injection";
        case CountermeasureAxis::shuffle: return "shuffle";
        case CountermeasureAxis::lowpass: return "lowpass";
        case CountermeasureAxis::noise: return "noise";
    }
    return "?";
}

std::string CountermeasureTable::render_csv() const {
    std::ostringstream os;
    os << "axis,level,seed,min_traces\n";
    for (const auto& cell : cells) {
        os << to_string(axis) << ',' << cell.level << ',' << cell.seed << ',';
        if (cell.min_traces)
            os << *cell.min_traces;
        else
            os << "not-reached";
        os << "\n";
    }
    return os.str();
}

CountermeasureTable countermeasure_experiment(const ExperimentConfig& config,
                                              CountermeasureAxis axis,
                                              const std::vector<double>& levels,
                                              const std::vector<std::uint64_t>& seeds) {
    if (levels.empty()) throw config_error("experiment needs at least one level");
    if (seeds.empty()) throw config_error("experiment needs at least one seed");

    // 1.12x steps: fine enough that medians and ratios are not dominated by
    // grid quantisation
    const std::vector<std::size_t> grid =
        config.grid.empty() ? cpa::geometric_grid(8, config.budget, 1.12) : config.grid;

    CountermeasureTable table;
    table.axis = axis;
    table.levels = levels;

    for (double level : levels) {
        sim::SynthConfig synth = config.base;
        switch (axis) {
            case CountermeasureAxis::injection:
                synth.countermeasures.inject_max = static_cast<unsigned>(level);
                break;
            case CountermeasureAxis::shuffle:
                synth.countermeasures.shuffle_sbox = level != 0.0;
                break;
            case CountermeasureAxis::lowpass:
                synth.countermeasures.lowpass_lambda = level;
                break;
            case CountermeasureAxis::noise:
                synth.noise.sigma = level;
                break;
        }

        std::vector<std::optional<std::size_t>> per_seed;
        for (std::uint64_t seed : seeds) {
            auto plaintexts = sim::random_plaintexts(config.budget, seed);
            sim::TraceSet set = sim::synthesize_trace_set(synth, plaintexts, seed);
            const std::uint8_t key_byte = synth.key[config.byte_index];
            auto result = cpa::minimal_stable_traces(set, config.model, config.byte_index,
                                                     grid, key_byte);
            per_seed.push_back(result);
            table.cells.push_back({level, seed, result});
        }
        // median with not-reached sorted to the top
        std::sort(per_seed.begin(), per_seed.end(),
                  [](const auto& a, const auto& b) {
                      if (a.has_value() != b.has_value()) return a.has_value();
                      return a.value_or(0) < b.value_or(0);
                  });
        table.medians.push_back(per_seed[per_seed.size() / 2]);
    }
    return table;
}

}  // namespace tracelab::attack
