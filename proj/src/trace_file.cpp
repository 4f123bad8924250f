// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/io/trace_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "tracelab/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "trace files are little-endian; byte-swapping is not implemented");

namespace tracelab::io {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'A', 'T'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint16_t kDataLen = 16;
constexpr std::size_t kHeaderSize = 4 + 2 + 1 + 2 + 4 + 4;

template <typename T>
void put(std::string& buf, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf.append(raw, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& pos) {
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
}

}  // namespace

void write_trace_set(const sim::TraceSet& set, const std::string& path) {
    if (set.traces.empty()) throw config_error("refusing to write an empty trace set");
    const std::size_t m = set.samples_per_trace();
    for (const auto& t : set.traces)
        if (t.samples.size() != m)
            throw config_error("trace set is ragged; all traces must share one length");

    std::string buf;
    buf.reserve(kHeaderSize + set.traces.size() * (16 + 4 * m));
    buf.append(kMagic, 4);
    put<std::uint16_t>(buf, kVersion);
    put<std::uint8_t>(buf, static_cast<std::uint8_t>(set.cipher_id));
    put<std::uint16_t>(buf, kDataLen);
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(set.traces.size()));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(m));
    for (const auto& t : set.traces) {
        buf.append(reinterpret_cast<const char*>(t.plaintext.data()), 16);
        buf.append(reinterpret_cast<const char*>(t.samples.data()), 4 * m);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("cannot open for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw format_error("short write to " + path);
}

sim::TraceSet read_trace_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < kHeaderSize)
        throw corruption_error("file shorter than header", buf.size());
    if (std::memcmp(buf.data(), kMagic, 4) != 0)
        throw format_error("bad magic; not a trace-set file");
    std::size_t pos = 4;
    const auto version = take<std::uint16_t>(buf, pos);
    if (version != kVersion)
        throw format_error("unsupported trace-file version " + std::to_string(version));
    const auto cipher = take<std::uint8_t>(buf, pos);
    if (cipher > 2) throw format_error("unknown cipher id " + std::to_string(cipher));
    const auto data_len = take<std::uint16_t>(buf, pos);
    if (data_len != kDataLen)
        throw format_error("unsupported data length " + std::to_string(data_len));
    const auto ntraces = take<std::uint32_t>(buf, pos);
    const auto nsamples = take<std::uint32_t>(buf, pos);

    const std::size_t record = 16 + 4 * static_cast<std::size_t>(nsamples);
    const std::size_t expected = kHeaderSize + static_cast<std::size_t>(ntraces) * record;
    if (buf.size() < expected)
        throw corruption_error("payload truncated; expected " + std::to_string(expected) +
                                   " bytes, file has " + std::to_string(buf.size()),
                               buf.size());
    if (buf.size() > expected)
        throw corruption_error("trailing bytes after declared payload", expected);

    sim::TraceSet set;
    set.cipher_id = static_cast<sim::CipherId>(cipher);
    set.meta.known = false;
    set.traces.resize(ntraces);
    for (auto& t : set.traces) {
        std::memcpy(t.plaintext.data(), buf.data() + pos, 16);
        pos += 16;
        t.samples.resize(nsamples);
        std::memcpy(t.samples.data(), buf.data() + pos, 4 * nsamples);
        pos += 4 * static_cast<std::size_t>(nsamples);
    }
    return set;
}

}  // namespace tracelab::io
