// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "tracelab/errors.hpp"
#include "tracelab/io/csv.hpp"
#include "tracelab/io/trace_file.hpp"

using namespace tracelab;
using namespace tracelab::sim;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("tracelab_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
}

TraceSet sample_set(std::size_t n = 20) {
    SynthConfig config;
    config.profile = aes_profile();
    config.key = parse_hex_block("677689798898a65765f765775b87688c");
    auto pts = random_plaintexts(n, 301);
    return synthesize_trace_set(config, pts, 301);
}

}  // namespace

TEST_CASE("trace file round trip") {
    TempDir dir;
    auto set = sample_set();
    const auto path = dir.file("a.scat");
    io::write_trace_set(set, path);

    auto loaded = io::read_trace_set(path);
    REQUIRE(loaded.traces.size() == set.traces.size());
    CHECK(loaded.cipher_id == set.cipher_id);
    CHECK_FALSE(loaded.meta.known);
    for (std::size_t i = 0; i < set.traces.size(); ++i) {
        CHECK(loaded.traces[i].plaintext == set.traces[i].plaintext);
        CHECK(loaded.traces[i].samples == set.traces[i].samples);
    }

    // a second write of the loaded set is byte-identical
    const auto path2 = dir.file("b.scat");
    io::write_trace_set(loaded, path2);
    CHECK(slurp(path) == slurp(path2));

    // header spot checks
    auto bytes = slurp(path);
    CHECK(bytes.substr(0, 4) == "SCAT");
    CHECK(static_cast<unsigned char>(bytes[6]) == 0);  // AES cipher id
}

TEST_CASE("trace file malformed fixtures") {
    TempDir dir;
    auto set = sample_set(4);
    const auto good_path = dir.file("good.scat");
    io::write_trace_set(set, good_path);
    const auto good = slurp(good_path);

    // wrong magic
    auto bad_magic = good;
    bad_magic[0] = 'X';
    spit(dir.file("magic.scat"), bad_magic);
    CHECK_THROWS_AS(io::read_trace_set(dir.file("magic.scat")), tracelab::format_error);

    // unsupported version
    auto bad_version = good;
    bad_version[4] = 9;
    spit(dir.file("version.scat"), bad_version);
    CHECK_THROWS_AS(io::read_trace_set(dir.file("version.scat")), tracelab::format_error);

    // header claims more traces than the payload holds
    auto short_payload = good;
    short_payload[7 + 2] = static_cast<char>(set.traces.size() + 3);
    spit(dir.file("short.scat"), short_payload);
    try {
        io::read_trace_set(dir.file("short.scat"));
        FAIL("expected corruption_error");
    } catch (const corruption_error& e) {
        CHECK(e.offset() == good.size());
    }

    // truncated mid-payload
    auto truncated = good.substr(0, good.size() - 10);
    spit(dir.file("trunc.scat"), truncated);
    try {
        io::read_trace_set(dir.file("trunc.scat"));
        FAIL("expected corruption_error");
    } catch (const corruption_error& e) {
        CHECK(e.offset() == truncated.size());
    }

    // trailing garbage
    auto trailing = good + "xx";
    spit(dir.file("trail.scat"), trailing);
    CHECK_THROWS_AS(io::read_trace_set(dir.file("trail.scat")), corruption_error);

    CHECK_THROWS_AS(io::read_trace_set(dir.file("missing.scat")), tracelab::format_error);

    TraceSet empty;
    CHECK_THROWS_AS(io::write_trace_set(empty, dir.file("empty.scat")), config_error);
}

TEST_CASE("csv exports") {
    auto set = sample_set(30);
    cpa::SelectionModel sbox{cpa::SelectionKind::aes_sbox, std::nullopt};
    auto h = cpa::build_hypotheses(set, sbox, 0);
    auto corr = cpa::pearson_correlate(set, h);
    auto csv = io::correlation_csv(corr);
    CHECK(csv.rfind("guess,s0,s1", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 257);  // header + 256 guesses

    auto sweep = cpa::sweep_traces(set, sbox, 0, {10, 20, 30});
    auto scsv = io::sweep_csv(sweep);
    CHECK(scsv.rfind("guess,n10,n20,n30", 0) == 0);

    std::vector<std::uint64_t> counts{3, 1, 2};
    CHECK(io::histogram_csv(counts) == "bin,count\n0,3\n1,1\n2,2\n");

    std::vector<double> mags{0.5, 1.5};
    CHECK(io::spectrum_csv(mags) == "bin,magnitude\n1,0.5\n2,1.5\n");
}
