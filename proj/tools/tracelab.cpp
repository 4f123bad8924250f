// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tracelab/attack/protocols.hpp"
#include "tracelab/cipher/aes128.hpp"
#include "tracelab/cipher/speck128.hpp"
#include "tracelab/cpa/engine.hpp"
#include "tracelab/errors.hpp"
#include "tracelab/io/csv.hpp"
#include "tracelab/io/trace_file.hpp"
#include "tracelab/rng/seedgen.hpp"
#include "tracelab/rng/stats.hpp"
#include "tracelab/sim/leakage.hpp"

using namespace tracelab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

std::string join_invocation(int argc, char** argv) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i) os << (i ? " " : "") << argv[i];
    return os.str();
}

std::vector<std::size_t> parse_grid(const std::string& text, std::size_t fallback_hi) {
    if (text.empty()) return cpa::default_grid(8, fallback_hi);
    std::vector<std::size_t> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(std::stoull(item));
    return grid;
}

struct SynthFlags {
    std::string cipher = "aes";
    std::string key_hex;
    std::size_t count = 500;
    std::uint64_t seed = 1;
    double alpha = 1.0, baseline = 0.0, sigma = 1.0;
    unsigned samples_per_event = 1, gap = 3;
    bool no_plaintext_loads = false, no_sbox = false;
    unsigned limb_width = 8;
    unsigned inject = 0;
    bool shuffle = false;
    double lowpass = 0.0;
    std::string window = "full";

    void add_to(CLI::App* cmd, bool with_cipher = true) {
        if (with_cipher)
            cmd->add_option("--cipher", cipher, "aes | speck-p1 | speck-p2")
                ->check(CLI::IsMember({"aes", "speck-p1", "speck-p2"}));
        cmd->add_option("--key", key_hex, "16-byte key, hex")->required();
        cmd->add_option("-n,--traces", count, "number of traces");
        cmd->add_option("--seed", seed, "generator seed");
        cmd->add_option("--alpha", alpha, "volts per unit Hamming weight");
        cmd->add_option("--baseline", baseline, "baseline volts");
        cmd->add_option("--sigma", sigma, "Gaussian noise std-dev");
        cmd->add_option("--samples-per-event", samples_per_event, "samples per bus access");
        cmd->add_option("--gap", gap, "noise samples between events");
        cmd->add_flag("--no-plaintext-loads", no_plaintext_loads, "omit plaintext load events (AES)");
        cmd->add_flag("--no-sbox", no_sbox, "omit sbox events (AES)");
        cmd->add_option("--limb-width", limb_width, "Speck bus width: 8 or 16")
            ->check(CLI::IsMember({8, 16}));
        cmd->add_option("--inject", inject, "max injected random instructions");
        cmd->add_flag("--shuffle", shuffle, "shuffle the sbox pairs");
        cmd->add_option("--lowpass", lowpass, "low-pass lambda in [0,1)");
        cmd->add_option("--window", window, "AES trigger span: full | loads | ark | sbox")
            ->check(CLI::IsMember({"full", "loads", "ark", "sbox"}));
    }

    sim::SynthConfig to_config() const {
        sim::SynthConfig config;
        if (cipher == "aes") {
            config.profile = sim::aes_profile(!no_plaintext_loads, !no_sbox);
            if (window == "loads") {
                config.profile.window_first = sim::EventTag::plaintext_load;
                config.profile.window_last = sim::EventTag::plaintext_load;
            } else if (window == "ark") {
                config.profile.window_first = sim::EventTag::ark_store;
                config.profile.window_last = sim::EventTag::ark_store;
            } else if (window == "sbox") {
                config.profile.window_first = sim::EventTag::sbox_load;
                config.profile.window_last = sim::EventTag::sbox_store;
            }
        } else if (cipher == "speck-p1")
            config.profile = sim::speck_phase1_profile(limb_width);
        else
            config.profile = sim::speck_phase2_profile(limb_width);
        config.noise.alpha = alpha;
        config.noise.baseline = baseline;
        config.noise.sigma = sigma;
        config.noise.samples_per_event = samples_per_event;
        config.noise.filler_gap = gap;
        config.countermeasures.inject_max = inject;
        config.countermeasures.shuffle_sbox = shuffle;
        config.countermeasures.lowpass_lambda = lowpass;
        config.key = parse_hex_block(key_hex);
        return config;
    }
};

cpa::SelectionModel parse_selection(const std::string& name, const std::string& k2_hex) {
    cpa::SelectionModel model;
    if (name == "sbox")
        model.kind = cpa::SelectionKind::aes_sbox;
    else if (name == "xor")
        model.kind = cpa::SelectionKind::aes_xor;
    else if (name == "speck-r1")
        model.kind = cpa::SelectionKind::speck_r1;
    else if (name == "speck-r2")
        model.kind = cpa::SelectionKind::speck_r2;
    else
        throw config_error("unknown selection: " + name);
    if (!k2_hex.empty()) {
        auto bytes = parse_hex(k2_hex);
        if (bytes.size() != 8) throw config_error("--k2 must be 8 bytes of hex");
        model.k2 = word_from_bytes_be(bytes.data());
    }
    return model;
}

unsigned selection_lanes(const cpa::SelectionModel& model) {
    return model.kind == cpa::SelectionKind::aes_sbox ||
                   model.kind == cpa::SelectionKind::aes_xor
               ? 16
               : 8;
}

int run(int argc, char** argv) {
    const std::string invocation = join_invocation(argc, argv);
    CLI::App app{"side-channel analysis laboratory: synthetic power traces and CPA attacks"};
    app.require_subcommand(1);

    // ---- cipher ----------------------------------------------------------
    auto* cipher_cmd = app.add_subcommand("cipher", "encrypt one block (vector checks)");
    std::string alg = "aes", key_hex, pt_hex;
    cipher_cmd->add_option("--alg", alg, "aes | speck")->check(CLI::IsMember({"aes", "speck"}));
    cipher_cmd->add_option("--key", key_hex, "16-byte key, hex")->required();
    cipher_cmd->add_option("--pt", pt_hex, "16-byte plaintext, hex")->required();
    cipher_cmd->callback([&] {
        auto key = parse_hex_block(key_hex);
        auto pt = parse_hex_block(pt_hex);
        if (alg == "aes") {
            std::cout << format_hex(cipher::aes128_encrypt(pt, key)) << "\n";
        } else {
            auto [k1, k2] = block_to_words(key);
            auto [p1, p2] = block_to_words(pt);
            auto ct = cipher::speck128_encrypt(p1, p2, cipher::speck_key_schedule(k1, k2));
            std::cout << format_hex(words_to_block(ct.first, ct.second)) << "\n";
        }
    });

    // ---- synth -----------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "synthesize a trace set and write it");
    SynthFlags synth;
    std::string synth_out;
    synth.add_to(synth_cmd);
    synth_cmd->add_option("-o,--out", synth_out, "output trace file")->required();
    synth_cmd->callback([&] {
        auto config = synth.to_config();
        auto pts = sim::random_plaintexts(synth.count, synth.seed);
        auto set = sim::synthesize_trace_set(config, pts, synth.seed);
        io::write_trace_set(set, synth_out);
        std::cout << "# " << invocation << "\nwrote " << set.traces.size() << " traces of "
                  << set.samples_per_trace() << " samples to " << synth_out << "\n";
    });

    // ---- attack ----------------------------------------------------------
    auto* attack_cmd = app.add_subcommand("attack", "per-lane CPA on a trace file");
    std::string attack_in, attack_selection = "sbox", attack_k2, attack_true, attack_report,
                attack_csv;
    attack_cmd->add_option("-i,--in", attack_in, "input trace file")->required();
    attack_cmd->add_option("--selection", attack_selection, "sbox | xor | speck-r1 | speck-r2");
    attack_cmd->add_option("--k2", attack_k2, "phase-1 K2 (8 bytes hex, for speck-r2)");
    attack_cmd->add_option("--true-key", attack_true,
                           "true lane bytes for grading (16 bytes, or 8 for speck lanes)");
    attack_cmd->add_option("--report", attack_report, "write the text report here too");
    attack_cmd->add_option("--csv", attack_csv, "write per-lane rankings as CSV");
    std::string attack_corr_csv;
    unsigned attack_corr_byte = 0;
    attack_cmd->add_option("--corr-csv", attack_corr_csv,
                           "write correlation-vs-time for one lane as CSV");
    attack_cmd->add_option("--corr-byte", attack_corr_byte, "lane for --corr-csv");
    attack_cmd->callback([&] {
        auto set = io::read_trace_set(attack_in);
        auto model = parse_selection(attack_selection, attack_k2);
        const unsigned lanes = selection_lanes(model);

        attack::AttackReport report;
        report.cipher = set.cipher_id;
        report.invocation = invocation;
        report.traces_used = {set.traces.size()};
        for (unsigned b = 0; b < lanes; ++b) {
            report.lanes.push_back(cpa::attack_byte(set, model, b));
            report.gaps.push_back(report.lanes.back().gap);
            report.recovered_key.push_back(static_cast<std::uint8_t>(report.lanes.back().best()));
        }
        if (!attack_true.empty()) {
            auto expect = parse_hex(attack_true);
            if (expect.size() != lanes)
                throw config_error("--true-key must supply one byte per attacked lane");
            report.success = std::equal(expect.begin(), expect.end(),
                                        report.recovered_key.begin());
        }
        auto text = report.render_text();
        std::cout << text;
        if (!attack_report.empty()) io::write_text_file(attack_report, text);
        if (!attack_csv.empty()) io::write_text_file(attack_csv, report.render_csv());
        if (!attack_corr_csv.empty()) {
            auto h = cpa::build_hypotheses(set, model, attack_corr_byte);
            io::write_text_file(attack_corr_csv,
                                io::correlation_csv(cpa::pearson_correlate(set, h)));
        }
    });

    // ---- speck-attack ----------------------------------------------------
    auto* speck_cmd = app.add_subcommand("speck-attack", "two-phase Speck attack");
    std::string sp1, sp2, speck_true;
    speck_cmd->add_option("--phase1", sp1, "phase-1 trace file (M1 window)")->required();
    speck_cmd->add_option("--phase2", sp2, "phase-2 trace file (M2 window)")->required();
    speck_cmd->add_option("--true-key", speck_true, "true 16-byte key for grading");
    speck_cmd->callback([&] {
        auto ts1 = io::read_trace_set(sp1);
        auto ts2 = io::read_trace_set(sp2);
        std::optional<Block128> truth;
        if (!speck_true.empty()) truth = parse_hex_block(speck_true);
        auto report = attack::attack_speck_full(ts1, ts2, truth);
        report.invocation = invocation;
        std::cout << report.render_text();
        const std::uint64_t k2 = word_from_bytes_be(report.recovered_key.data() + 8);
        auto phase2 = attack::attack_speck_phase2(ts2, k2);
        std::cout << "k2=" << format_hex_u64(k2) << " k'=" << format_hex_u64(phase2.k_prime)
                  << " k1=" << format_hex_u64(phase2.k1)
                  << (phase2.low_confidence ? "  [low confidence]" : "") << "\n";
    });

    // ---- sweep -----------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "peak correlation vs trace count");
    std::string sweep_in, sweep_selection = "sbox", sweep_k2, sweep_grid, sweep_out;
    unsigned sweep_byte = 0;
    sweep_cmd->add_option("-i,--in", sweep_in, "input trace file")->required();
    sweep_cmd->add_option("--selection", sweep_selection, "sbox | xor | speck-r1 | speck-r2");
    sweep_cmd->add_option("--k2", sweep_k2, "phase-1 K2 (for speck-r2)");
    sweep_cmd->add_option("--byte", sweep_byte, "lane to attack");
    sweep_cmd->add_option("--grid", sweep_grid, "comma-separated ascending counts");
    sweep_cmd->add_option("-o,--out", sweep_out, "trajectory CSV path")->required();
    sweep_cmd->callback([&] {
        auto set = io::read_trace_set(sweep_in);
        auto model = parse_selection(sweep_selection, sweep_k2);
        auto grid = parse_grid(sweep_grid, set.traces.size());
        auto sweep = cpa::sweep_traces(set, model, sweep_byte, grid);
        io::write_text_file(sweep_out, io::sweep_csv(sweep));
        std::cout << "# " << invocation << "\nwrote " << grid.size() << " grid points to "
                  << sweep_out << "\n";
    });

    // ---- zero-key-demo ---------------------------------------------------
    auto* zk_cmd = app.add_subcommand("zero-key-demo",
                                      "paired synthesis + the xor-selection anomaly");
    SynthFlags zk;
    std::string zk_prefix;
    zk.add_to(zk_cmd, false);
    zk_cmd->add_option("-o,--out-prefix", zk_prefix, "write <prefix>_{with,without}.csv rankings");
    zk_cmd->callback([&] {
        SynthFlags with_flags = zk;
        with_flags.cipher = "aes";
        with_flags.no_plaintext_loads = false;
        with_flags.no_sbox = true;
        SynthFlags without_flags = with_flags;
        without_flags.no_plaintext_loads = true;

        auto pts = sim::random_plaintexts(zk.count, zk.seed);
        auto set_with = sim::synthesize_trace_set(with_flags.to_config(), pts, zk.seed);
        auto set_without = sim::synthesize_trace_set(without_flags.to_config(), pts, zk.seed);
        auto truth = parse_hex_block(zk.key_hex);
        auto d = attack::zero_key_diagnostic(set_with, set_without, truth);

        std::cout << "# " << invocation << "\n";
        std::cout << "with loads (xor selection over the load window), top guess per lane:\n ";
        for (auto g : d.top_with_loads) std::printf(" %02X", g);
        std::cout << "\n  lanes reporting zero: " << d.lanes_topped_by_zero << "/16\n";
        std::cout << "full window, top guess per lane:\n ";
        for (auto g : d.top_full_window) std::printf(" %02X", g);
        std::cout << "\nwithout loads, top guess per lane:\n ";
        for (auto g : d.top_without_loads) std::printf(" %02X", g);
        std::cout << "\n  lanes reporting the true key: " << d.lanes_topped_by_true << "/16\n";
        std::cout << "guess-0 peak precedes the true-key peak on every lane: ";
        bool ordered = true;
        for (int b = 0; b < 16; ++b)
            ordered = ordered && d.zero_peak_time[b] < d.true_peak_time[b];
        std::cout << (ordered ? "yes" : "no") << "\n";

        if (!zk_prefix.empty()) {
            cpa::SelectionModel xorsel{cpa::SelectionKind::aes_xor, std::nullopt};
            auto hw = cpa::build_hypotheses(set_with, xorsel, 0);
            io::write_text_file(zk_prefix + "_with.csv",
                                io::correlation_csv(cpa::pearson_correlate(set_with, hw)));
            auto ho = cpa::build_hypotheses(set_without, xorsel, 0);
            io::write_text_file(zk_prefix + "_without.csv",
                                io::correlation_csv(cpa::pearson_correlate(set_without, ho)));
        }
    });

    // ---- counter-experiment ----------------------------------------------
    auto* exp_cmd = app.add_subcommand("counter-experiment",
                                       "minimal stable traces per countermeasure level");
    SynthFlags exp;
    std::string exp_axis = "injection", exp_levels = "0,1,3,7", exp_grid, exp_out;
    unsigned exp_seeds = 5, exp_byte = 0;
    std::size_t exp_budget = 4000;
    exp.add_to(exp_cmd, false);
    exp_cmd->add_option("--axis", exp_axis, "injection | shuffle | lowpass | noise")
        ->check(CLI::IsMember({"injection", "shuffle", "lowpass", "noise"}));
    exp_cmd->add_option("--levels", exp_levels, "comma-separated axis levels");
    exp_cmd->add_option("--seeds", exp_seeds, "number of paired seeds");
    exp_cmd->add_option("--budget", exp_budget, "traces synthesized per cell");
    exp_cmd->add_option("--grid", exp_grid, "attack grid (default 1.25x steps)");
    exp_cmd->add_option("--byte", exp_byte, "lane to attack");
    exp_cmd->add_option("-o,--out", exp_out, "cell table CSV path");
    exp_cmd->callback([&] {
        attack::ExperimentConfig config;
        exp.cipher = "aes";
        // countermeasure comparisons attack the sbox region; a wider trigger
        // would leave unshifted AddRoundKey columns in the trace
        if (exp.window == "full") exp.window = "sbox";
        config.base = exp.to_config();
        config.model = {cpa::SelectionKind::aes_sbox, std::nullopt};
        config.byte_index = exp_byte;
        config.budget = exp_budget;
        config.grid = exp_grid.empty() ? std::vector<std::size_t>{}
                                       : parse_grid(exp_grid, exp_budget);

        attack::CountermeasureAxis axis = attack::CountermeasureAxis::injection;
        if (exp_axis == "shuffle") axis = attack::CountermeasureAxis::shuffle;
        if (exp_axis == "lowpass") axis = attack::CountermeasureAxis::lowpass;
        if (exp_axis == "noise") axis = attack::CountermeasureAxis::noise;

        std::vector<double> levels;
        std::stringstream ss(exp_levels);
        std::string item;
        while (std::getline(ss, item, ',')) levels.push_back(std::stod(item));
        std::vector<std::uint64_t> seeds;
        for (unsigned i = 0; i < exp_seeds; ++i) seeds.push_back(exp.seed + i);

        auto table = attack::countermeasure_experiment(config, axis, levels, seeds);
        std::cout << "# " << invocation << "\naxis: " << exp_axis << "\n";
        bool all_reached = true;
        for (std::size_t l = 0; l < levels.size(); ++l) {
            std::cout << "level " << levels[l] << ": median minimal stable traces = ";
            if (table.medians[l])
                std::cout << *table.medians[l] << "\n";
            else {
                std::cout << "not-reached (budget " << exp_budget << ")\n";
                all_reached = false;
            }
        }
        if (!exp_out.empty()) io::write_text_file(exp_out, table.render_csv());
        if (!all_reached) throw degenerate_data_error("a level never stabilised within budget");
    });

    // ---- randtest ----------------------------------------------------------
    auto* rt_cmd = app.add_subcommand("randtest", "seed-pipeline randomness tests");
    std::string rt_source = "bits", rt_prefix;
    double rt_p = 0.02;
    unsigned rt_adc_bits = 10, rt_n = 16, rt_m = 1000, rt_bins = 100;
    std::size_t rt_count = 20000;
    std::uint64_t rt_seed = 1;
    rt_cmd->add_option("--source", rt_source, "bits | adc | prng")
        ->check(CLI::IsMember({"bits", "adc", "prng"}));
    rt_cmd->add_option("--p", rt_p, "P(bit=1) of the pulse source");
    rt_cmd->add_option("--adc-bits", rt_adc_bits, "ADC resolution k");
    rt_cmd->add_option("-n,--bits", rt_n, "seed width in bits");
    rt_cmd->add_option("-m,--folds", rt_m, "values xor-folded per seed");
    rt_cmd->add_option("--count", rt_count, "number of seeds to generate");
    rt_cmd->add_option("--bins", rt_bins, "histogram/chi-square bins");
    rt_cmd->add_option("--seed", rt_seed, "generator seed");
    rt_cmd->add_option("-o,--out-prefix", rt_prefix, "write <prefix>_{hist,spectrum}.csv");
    rt_cmd->callback([&] {
        std::vector<std::uint64_t> values(rt_count);
        rng::Stream stream(rng::derive_stream(rt_seed, rng::kStreamSeedSource, 0));
        if (rt_source == "bits") {
            rng::BiasedBitSource src{rt_p, stream};
            for (auto& v : values) v = rng::assemble_seed_from_bits(src, rt_n, rt_m);
        } else if (rt_source == "adc") {
            rng::AdcWordSource src{rt_adc_bits, stream};
            for (auto& v : values) v = rng::assemble_seed_from_adc(src, rt_n, rt_m);
        } else {
            const std::uint64_t mask = rt_n == 64 ? ~0ull : (1ull << rt_n) - 1;
            for (auto& v : values) v = stream.next_u64() & mask;
        }

        std::cout << "# " << invocation << "\n";
        auto chi = rng::chi_square_uniformity(values, rt_bins);
        std::printf("chi-square: statistic=%.2f critical=%.2f -> %s\n", chi.statistic,
                    chi.critical, chi.pass ? "PASS" : "FAIL");
        auto spec = rng::spectral_flatness(std::span<const std::uint64_t>(values));
        std::printf("spectral flatness: max/mean=%.2f threshold=10 -> %s\n", spec.flatness,
                    spec.pass ? "PASS" : "FAIL");
        if (!rt_prefix.empty()) {
            io::write_text_file(rt_prefix + "_hist.csv",
                                io::histogram_csv(rng::histogram(values, rt_bins)));
            io::write_text_file(rt_prefix + "_spectrum.csv", io::spectrum_csv(spec.magnitudes));
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const invalid_operand_error& e) {
        std::cerr << "invalid operand: " << e.what() << "\n";
        return kExitUsage;
    } catch (const corruption_error& e) {
        std::cerr << "corrupt data: " << e.what() << "\n";
        return kExitData;
    } catch (const format_error& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitData;
    } catch (const degenerate_data_error& e) {
        std::cerr << "degenerate data: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const insufficient_data_error& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
