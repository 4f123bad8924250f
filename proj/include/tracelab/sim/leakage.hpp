// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracelab/hex.hpp"
#include "tracelab/rng/prng.hpp"

namespace tracelab::sim {

enum class CipherId : std::uint8_t {
    aes128 = 0,
    speck128_phase1 = 1,
    speck128_phase2 = 2,
};

// One value crossing the data bus.  Every memory read or write of an
// intermediate drives the bus and leaks the Hamming weight of the value.
enum class EventTag : std::uint8_t {
    plaintext_load,
    ark_store,
    sbox_load,
    sbox_store,
    speck_t_store,
    speck_r1_store,
    speck_r1_load_m1,
    speck_y1_store,
    speck_r2_store,
    speck_r2_load_m2,
    random_filler,
};

const char* to_string(EventTag tag);

struct LeakageEvent {
    std::uint16_t value = 0;  // bus word, 8 or 16 bits wide
    EventTag tag = EventTag::random_filler;
    std::uint8_t lane = 0;  // byte/limb index within the intermediate
};

// Ordered bus accesses for one encryption.  Only events inside the capture
// window [window_begin, window_end] are rendered into samples; the window
// models the oscilloscope trigger placement and is located at build time
// from the profile's (first_tag, last_tag) pair.  Injected events inside
// the window extend window_end.  max_window_events is the largest in-window
// event count any trace of the same configuration can have (base events
// plus the injection ceiling), so that all traces in a set share one length.
struct EventSchedule {
    std::vector<LeakageEvent> events;
    EventTag window_first = EventTag::plaintext_load;
    EventTag window_last = EventTag::sbox_store;
    std::size_t window_begin = 0;
    std::size_t window_end = 0;  // inclusive
    std::size_t max_window_events = 0;
    unsigned value_bits = 8;

    std::pair<std::size_t, std::size_t> window_span() const {
        return {window_begin, window_end};
    }
};

struct ScheduleProfile {
    CipherId cipher = CipherId::aes128;

    // AES: which bus accesses the trigger covers.
    bool include_plaintext_loads = true;
    bool include_sbox = true;

    // Speck: register width of the simulated microcontroller.
    unsigned limb_width = 8;

    // Trigger placement.  Defaults are filled in by the factories below.
    EventTag window_first = EventTag::plaintext_load;
    EventTag window_last = EventTag::sbox_store;
};

// Full AES window: plaintext loads (optional), AddRoundKey stores, then the
// 16 sbox (load, store) pairs (optional).
ScheduleProfile aes_profile(bool include_plaintext_loads = true, bool include_sbox = true);

// Phase 1 measures across the M1 operation only: the reload of R1 at the
// start of round 2.  Phase 2 covers y1 stores through the M2 reload of R2.
ScheduleProfile speck_phase1_profile(unsigned limb_width = 8);
ScheduleProfile speck_phase2_profile(unsigned limb_width = 8);

EventSchedule build_event_schedule(const ScheduleProfile& profile,
                                   const Block128& plaintext, const Block128& key);

// Inserts u ~ Uniform{0..n_max} random single-byte bus accesses immediately
// before the first event tagged position_tag, shifting everything after it.
// Insertion at the window-opening event counts as in-window (the trigger
// has already fired when the fillers execute); in-window insertion grows
// max_window_events by n_max so injected and uninjected traces stay the
// same length.
EventSchedule inject_random_instructions(const EventSchedule& schedule, unsigned n_max,
                                         EventTag position_tag, rng::Stream& stream);

// Applies one uniform random permutation to the 16 sbox (load, store)
// pairs, keeping each pair adjacent and intact.
EventSchedule shuffle_sbox_events(const EventSchedule& schedule, rng::Stream& stream);

struct NoiseConfig {
    double alpha = 1.0;     // volts per unit Hamming weight
    double baseline = 0.0;  // volts
    double sigma = 1.0;     // Gaussian noise std-dev, volts
    unsigned samples_per_event = 1;
    unsigned filler_gap = 3;  // noise-only samples between event bursts

    void validate() const;

    // Trace length for a window holding max_events events: a leading gap,
    // then one burst plus one gap per event slot.
    std::size_t trace_length(std::size_t max_events) const;

    // First sample column of event slot k; slots are fixed by construction
    // so synthetic sets can be sliced by event region.
    std::size_t slot_column(std::size_t k) const;
};

struct PowerTrace {
    std::vector<float> samples;
    Block128 plaintext{};
};

struct CountermeasureConfig {
    unsigned inject_max = 0;  // 0 disables injection
    // nullopt inserts at the window-opening event: the fillers execute right
    // after the trigger fires and shift every captured event
    std::optional<EventTag> inject_before;
    bool shuffle_sbox = false;
    double lowpass_lambda = 0.0;  // 0 disables the filter
};

struct TraceSetMeta {
    std::uint64_t seed = 0;
    NoiseConfig noise;
    CountermeasureConfig countermeasures;
    ScheduleProfile profile;
    bool known = false;  // false for sets loaded from disk
};

struct TraceSet {
    std::vector<PowerTrace> traces;
    CipherId cipher_id = CipherId::aes128;
    TraceSetMeta meta;

    std::size_t samples_per_trace() const {
        return traces.empty() ? 0 : traces.front().samples.size();
    }
};

// Renders the in-window events: per event, samples_per_event samples of
// baseline + alpha * HW(value) + N(0, sigma^2), separated by filler_gap
// noise samples; the trace is right-padded with noise to the length implied
// by max_window_events.
PowerTrace synthesize_trace(const EventSchedule& schedule, const NoiseConfig& noise,
                            rng::Stream& stream);

// Single-pole recursive smoother y[0] = x[0], y[t] = lambda*y[t-1] +
// (1-lambda)*x[t]; the trace-level model of a power-line filter.
PowerTrace lowpass_filter(const PowerTrace& trace, double lambda);

struct SynthConfig {
    ScheduleProfile profile;
    NoiseConfig noise;
    CountermeasureConfig countermeasures;
    Block128 key{};
};

// One trace per plaintext.  Trace i consumes only the substream derived
// from (seed, kStreamTrace, i): first the countermeasure draws, then the
// noise samples, so regeneration and out-of-order generation are
// bit-identical to sequential generation.
TraceSet synthesize_trace_set(const SynthConfig& config,
                              std::span<const Block128> plaintexts, std::uint64_t seed);

// Random plaintext blocks from the (seed, kStreamPlaintext, i) substreams.
std::vector<Block128> random_plaintexts(std::size_t count, std::uint64_t seed);

// Copy of the set keeping sample columns [first, last) of every trace.
TraceSet slice_columns(const TraceSet& set, std::size_t first, std::size_t last);

inline unsigned hamming_weight(std::uint64_t v) {
    return static_cast<unsigned>(std::popcount(v));
}
inline unsigned hamming_distance(std::uint64_t v0, std::uint64_t v1) {
    return hamming_weight(v0 ^ v1);
}

}  // namespace tracelab::sim
