// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/sim/leakage.hpp"

#include <algorithm>

#include "tracelab/cipher/aes128.hpp"
#include "tracelab/cipher/speck128.hpp"
#include "tracelab/errors.hpp"

namespace tracelab::sim {

const char* to_string(EventTag tag) {
    switch (tag) {
        case EventTag::plaintext_load: return "plaintext_load";
        case EventTag::ark_store: return "ark_store";
        case EventTag::sbox_load: return "sbox_load";
        case EventTag::sbox_store: return "sbox_store";
        case EventTag::speck_t_store: return "speck_t_store";
        case EventTag::speck_r1_store: return "speck_r1_store";
        case EventTag::speck_r1_load_m1: return "speck_r1_load_m1";
        case EventTag::speck_y1_store: return "speck_y1_store";
        case EventTag::speck_r2_store: return "speck_r2_store";
        case EventTag::speck_r2_load_m2: return "speck_r2_load_m2";
        case EventTag::random_filler: return "random_filler";
    }
    return "?";
}

namespace {

// Locates the window from its delimiting tags; used once at build time.
std::pair<std::size_t, std::size_t> locate_window(const std::vector<LeakageEvent>& events,
                                                  EventTag first_tag, EventTag last_tag) {
    std::size_t first = events.size(), last = events.size();
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].tag == first_tag) {
            first = i;
            break;
        }
    }
    for (std::size_t i = events.size(); i-- > 0;) {
        if (events[i].tag == last_tag) {
            last = i;
            break;
        }
    }
    if (first >= events.size() || last >= events.size() || last < first)
        throw config_error("capture window tags not present in schedule order");
    return {first, last};
}

}  // namespace

ScheduleProfile aes_profile(bool include_plaintext_loads, bool include_sbox) {
    ScheduleProfile p;
    p.cipher = CipherId::aes128;
    p.include_plaintext_loads = include_plaintext_loads;
    p.include_sbox = include_sbox;
    p.window_first = include_plaintext_loads ? EventTag::plaintext_load : EventTag::ark_store;
    p.window_last = include_sbox ? EventTag::sbox_store : EventTag::ark_store;
    return p;
}

ScheduleProfile speck_phase1_profile(unsigned limb_width) {
    ScheduleProfile p;
    p.cipher = CipherId::speck128_phase1;
    p.limb_width = limb_width;
    p.window_first = EventTag::speck_r1_load_m1;
    p.window_last = EventTag::speck_r1_load_m1;
    return p;
}

ScheduleProfile speck_phase2_profile(unsigned limb_width) {
    ScheduleProfile p;
    p.cipher = CipherId::speck128_phase2;
    p.limb_width = limb_width;
    p.window_first = EventTag::speck_y1_store;
    p.window_last = EventTag::speck_r2_load_m2;
    return p;
}

namespace {

// Emits one limb group, least significant limb first.
void emit_word(std::vector<LeakageEvent>& events, std::uint64_t word,
               EventTag tag, unsigned limb_width) {
    const unsigned limbs = 64 / limb_width;
    const std::uint64_t mask = (1u << limb_width) - 1;
    for (unsigned i = 0; i < limbs; ++i)
        events.push_back({static_cast<std::uint16_t>((word >> (i * limb_width)) & mask),
                          tag, static_cast<std::uint8_t>(i)});
}

EventSchedule build_aes_schedule(const ScheduleProfile& profile,
                                 const Block128& plaintext, const Block128& key) {
    auto taps = cipher::aes_round1_intermediates(plaintext, key);
    EventSchedule s;
    s.value_bits = 8;
    if (profile.include_plaintext_loads)
        for (int i = 0; i < 16; ++i)
            s.events.push_back({plaintext[i], EventTag::plaintext_load, static_cast<std::uint8_t>(i)});
    for (int i = 0; i < 16; ++i)
        s.events.push_back({taps.ark[i], EventTag::ark_store, static_cast<std::uint8_t>(i)});
    if (profile.include_sbox) {
        // one lookup per byte: reload the AddRoundKey result, then store the
        // substituted value, so the pairs stay adjacent
        for (int i = 0; i < 16; ++i) {
            s.events.push_back({taps.ark[i], EventTag::sbox_load, static_cast<std::uint8_t>(i)});
            s.events.push_back({taps.sbox_out[i], EventTag::sbox_store, static_cast<std::uint8_t>(i)});
        }
    }
    return s;
}

EventSchedule build_speck_schedule(const ScheduleProfile& profile,
                                   const Block128& plaintext, const Block128& key) {
    if (profile.limb_width != 8 && profile.limb_width != 16)
        throw config_error("speck limb width must be 8 or 16");
    auto [pt1, pt2] = block_to_words(plaintext);
    auto [k1, k2] = block_to_words(key);
    auto sched = cipher::speck_key_schedule(k1, k2);
    auto r1v = cipher::speck_round1_values(pt1, pt2, k2);
    std::uint64_t u = cipher::speck_round2_target(r1v.r1, r1v.y1);
    std::uint64_t r2 = u ^ sched.round_keys[1];

    EventSchedule s;
    s.value_bits = profile.limb_width;
    emit_word(s.events, r1v.t, EventTag::speck_t_store, profile.limb_width);
    emit_word(s.events, r1v.r1, EventTag::speck_r1_store, profile.limb_width);
    emit_word(s.events, r1v.r1, EventTag::speck_r1_load_m1, profile.limb_width);
    emit_word(s.events, r1v.y1, EventTag::speck_y1_store, profile.limb_width);
    emit_word(s.events, r2, EventTag::speck_r2_store, profile.limb_width);
    emit_word(s.events, r2, EventTag::speck_r2_load_m2, profile.limb_width);
    return s;
}

}  // namespace

EventSchedule build_event_schedule(const ScheduleProfile& profile,
                                   const Block128& plaintext, const Block128& key) {
    EventSchedule s;
    switch (profile.cipher) {
        case CipherId::aes128:
            s = build_aes_schedule(profile, plaintext, key);
            break;
        case CipherId::speck128_phase1:
        case CipherId::speck128_phase2:
            s = build_speck_schedule(profile, plaintext, key);
            break;
        default:
            throw config_error("unknown cipher in schedule profile");
    }
    s.window_first = profile.window_first;
    s.window_last = profile.window_last;
    auto [first, last] = locate_window(s.events, profile.window_first, profile.window_last);
    s.window_begin = first;
    s.window_end = last;
    s.max_window_events = last - first + 1;
    return s;
}

EventSchedule inject_random_instructions(const EventSchedule& schedule, unsigned n_max,
                                         EventTag position_tag, rng::Stream& stream) {
    auto it = std::find_if(schedule.events.begin(), schedule.events.end(),
                           [&](const LeakageEvent& e) { return e.tag == position_tag; });
    if (it == schedule.events.end())
        throw config_error(std::string("injection position tag not in schedule: ") +
                           to_string(position_tag));
    EventSchedule out = schedule;
    if (n_max == 0) return out;

    const auto idx = static_cast<std::size_t>(it - schedule.events.begin());
    const auto u = static_cast<std::size_t>(stream.next_below(n_max + 1));
    std::vector<LeakageEvent> fillers(u);
    for (auto& f : fillers)
        f = {static_cast<std::uint16_t>(stream.next_u64() & 0xff), EventTag::random_filler, 0};
    out.events.insert(out.events.begin() + static_cast<std::ptrdiff_t>(idx),
                      fillers.begin(), fillers.end());

    if (idx < schedule.window_begin) {
        // fillers run before the trigger fires: not captured
        out.window_begin += u;
        out.window_end += u;
    } else if (idx <= schedule.window_end) {
        // captured: later events shift and the maximum window size grows
        out.window_end += u;
        out.max_window_events += n_max;
    }
    return out;
}

EventSchedule shuffle_sbox_events(const EventSchedule& schedule, rng::Stream& stream) {
    std::vector<std::size_t> pair_starts;
    for (std::size_t i = 0; i + 1 < schedule.events.size(); ++i)
        if (schedule.events[i].tag == EventTag::sbox_load &&
            schedule.events[i + 1].tag == EventTag::sbox_store)
            pair_starts.push_back(i);
    if (pair_starts.size() != 16)
        throw config_error("schedule lacks the 16 sbox load/store pairs");

    // Fisher-Yates over the 16 lanes
    std::array<std::size_t, 16> perm;
    for (std::size_t i = 0; i < 16; ++i) perm[i] = i;
    for (std::size_t i = 15; i > 0; --i)
        std::swap(perm[i], perm[stream.next_below(i + 1)]);

    EventSchedule out = schedule;
    for (std::size_t slot = 0; slot < 16; ++slot) {
        out.events[pair_starts[slot]] = schedule.events[pair_starts[perm[slot]]];
        out.events[pair_starts[slot] + 1] = schedule.events[pair_starts[perm[slot]] + 1];
    }
    return out;
}

void NoiseConfig::validate() const {
    if (!(alpha > 0.0)) throw config_error("alpha must be positive");
    if (sigma < 0.0) throw config_error("sigma must be non-negative");
    if (samples_per_event < 1) throw config_error("samples_per_event must be >= 1");
}

std::size_t NoiseConfig::trace_length(std::size_t max_events) const {
    return filler_gap + max_events * (samples_per_event + filler_gap);
}

std::size_t NoiseConfig::slot_column(std::size_t k) const {
    return filler_gap + k * (samples_per_event + filler_gap);
}

PowerTrace synthesize_trace(const EventSchedule& schedule, const NoiseConfig& noise,
                            rng::Stream& stream) {
    noise.validate();
    auto [first, last] = schedule.window_span();
    if (last < first || last >= schedule.events.size())
        throw config_error("capture window indices out of range");
    const std::size_t in_window = last - first + 1;
    if (in_window > schedule.max_window_events)
        throw config_error("schedule exceeds its declared maximum window size");

    PowerTrace trace;
    trace.samples.reserve(noise.trace_length(schedule.max_window_events));
    auto noise_sample = [&]() -> double {
        return noise.sigma > 0.0 ? noise.baseline + noise.sigma * stream.next_gaussian()
                                 : noise.baseline;
    };
    auto push_noise = [&](std::size_t count) {
        for (std::size_t i = 0; i < count; ++i)
            trace.samples.push_back(static_cast<float>(noise_sample()));
    };

    push_noise(noise.filler_gap);
    for (std::size_t i = first; i <= last; ++i) {
        const double level =
            noise.baseline + noise.alpha * hamming_weight(schedule.events[i].value);
        for (unsigned s = 0; s < noise.samples_per_event; ++s) {
            double sample = noise.sigma > 0.0 ? level + noise.sigma * stream.next_gaussian() : level;
            trace.samples.push_back(static_cast<float>(sample));
        }
        push_noise(noise.filler_gap);
    }
    // right-pad short schedules so every trace in the set has the same
    // length; shifted events, not padding position, carry the misalignment
    push_noise((schedule.max_window_events - in_window) *
               (noise.samples_per_event + noise.filler_gap));
    return trace;
}

PowerTrace lowpass_filter(const PowerTrace& trace, double lambda) {
    if (lambda < 0.0 || lambda >= 1.0) throw config_error("lambda must be in [0, 1)");
    PowerTrace out;
    out.plaintext = trace.plaintext;
    out.samples.resize(trace.samples.size());
    if (trace.samples.empty()) return out;
    double y = trace.samples[0];
    out.samples[0] = static_cast<float>(y);
    for (std::size_t t = 1; t < trace.samples.size(); ++t) {
        y = lambda * y + (1.0 - lambda) * static_cast<double>(trace.samples[t]);
        out.samples[t] = static_cast<float>(y);
    }
    return out;
}

TraceSet synthesize_trace_set(const SynthConfig& config,
                              std::span<const Block128> plaintexts, std::uint64_t seed) {
    if (plaintexts.empty()) throw config_error("need at least one plaintext");
    config.noise.validate();

    TraceSet set;
    set.cipher_id = config.profile.cipher;
    set.meta.seed = seed;
    set.meta.noise = config.noise;
    set.meta.countermeasures = config.countermeasures;
    set.meta.profile = config.profile;
    set.meta.known = true;
    set.traces.resize(plaintexts.size());

#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(plaintexts.size()); ++i) {
        rng::Stream stream(rng::derive_stream(seed, rng::kStreamTrace,
                                              static_cast<std::uint64_t>(i)));
        EventSchedule schedule =
            build_event_schedule(config.profile, plaintexts[i], config.key);
        if (config.countermeasures.inject_max > 0) {
            const EventTag position = config.countermeasures.inject_before.value_or(
                schedule.events[schedule.window_begin].tag);
            schedule = inject_random_instructions(schedule, config.countermeasures.inject_max,
                                                  position, stream);
        }
        if (config.countermeasures.shuffle_sbox)
            schedule = shuffle_sbox_events(schedule, stream);
        PowerTrace trace = synthesize_trace(schedule, config.noise, stream);
        if (config.countermeasures.lowpass_lambda > 0.0)
            trace = lowpass_filter(trace, config.countermeasures.lowpass_lambda);
        trace.plaintext = plaintexts[i];
        set.traces[i] = std::move(trace);
    }
    return set;
}

std::vector<Block128> random_plaintexts(std::size_t count, std::uint64_t seed) {
    std::vector<Block128> pts(count);
    for (std::size_t i = 0; i < count; ++i) {
        rng::Stream stream(rng::derive_stream(seed, rng::kStreamPlaintext, i));
        for (auto& b : pts[i]) b = static_cast<std::uint8_t>(stream.next_u64() & 0xff);
    }
    return pts;
}

TraceSet slice_columns(const TraceSet& set, std::size_t first, std::size_t last) {
    if (first >= last || last > set.samples_per_trace())
        throw config_error("column slice out of range");
    TraceSet out;
    out.cipher_id = set.cipher_id;
    out.meta = set.meta;
    out.traces.resize(set.traces.size());
    for (std::size_t i = 0; i < set.traces.size(); ++i) {
        out.traces[i].plaintext = set.traces[i].plaintext;
        out.traces[i].samples.assign(set.traces[i].samples.begin() + static_cast<std::ptrdiff_t>(first),
                                     set.traces[i].samples.begin() + static_cast<std::ptrdiff_t>(last));
    }
    return out;
}

}  // namespace tracelab::sim
