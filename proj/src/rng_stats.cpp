// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/rng/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tracelab/errors.hpp"

namespace tracelab::rng {

namespace {

struct CriticalRow {
    unsigned bins;
    double p01;
    double p05;
};

// Upper-tail chi-square critical values for df = bins - 1.
constexpr CriticalRow kCriticalTable[] = {
    {2, 6.6349, 3.8415},      {4, 11.3449, 7.8147},    {8, 18.4753, 14.0671},
    {10, 21.6660, 16.9190},   {16, 30.5779, 24.9958},  {32, 52.1914, 44.9853},
    {50, 74.9195, 66.3386},   {64, 92.0100, 82.5287},  {100, 134.6416, 123.2252},
    {128, 166.9874, 154.3015}, {200, 248.3286, 232.9118}, {256, 310.4574, 293.2478},
};

double critical_value(unsigned bins, double significance) {
    for (const auto& row : kCriticalTable) {
        if (row.bins != bins) continue;
        if (significance == 0.01) return row.p01;
        if (significance == 0.05) return row.p05;
        throw config_error("tabulated significances are 0.01 and 0.05");
    }
    throw config_error("no tabulated chi-square critical value for " +
                       std::to_string(bins) + " bins");
}

}  // namespace

std::vector<std::uint64_t> histogram(std::span<const std::uint64_t> samples, unsigned bins) {
    if (bins < 1) throw config_error("histogram needs at least one bin");
    std::vector<std::uint64_t> counts(bins, 0);
    if (samples.empty()) return counts;
    auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const std::uint64_t lo = *lo_it, hi = *hi_it;
    if (lo == hi) {
        counts[0] = samples.size();
        return counts;
    }
    const double width = static_cast<double>(hi - lo) / bins;
    for (std::uint64_t v : samples) {
        auto idx = static_cast<std::size_t>(static_cast<double>(v - lo) / width);
        counts[std::min<std::size_t>(idx, bins - 1)] += 1;
    }
    return counts;
}

ChiSquareResult chi_square_uniformity(std::span<const std::uint64_t> samples,
                                      unsigned bins, double significance) {
    if (bins < 2) throw config_error("chi-square needs at least two bins");
    if (samples.size() < 10 * static_cast<std::size_t>(bins))
        throw insufficient_data_error("chi-square needs at least 10 samples per bin");
    auto counts = histogram(samples, bins);
    const double expected = static_cast<double>(samples.size()) / bins;
    double stat = 0.0;
    for (std::uint64_t c : counts) {
        double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    ChiSquareResult r;
    r.statistic = stat;
    r.critical = critical_value(bins, significance);
    r.pass = stat < r.critical;
    return r;
}

SpectralResult spectral_flatness(std::span<const double> samples, double threshold) {
    const std::size_t n = samples.size();
    if (n < 256) throw insufficient_data_error("spectral test needs at least 256 samples");
    const std::size_t half = n / 2;
    SpectralResult r;
    r.magnitudes.resize(half);
    // direct DFT per bin via phasor recurrence; n is a few tens of thousands
    // at most so an FFT is not worth the dependency
#pragma omp parallel for schedule(static)
    for (long long kk = 1; kk <= static_cast<long long>(half); ++kk) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(kk) / static_cast<double>(n);
        const double wr = std::cos(angle), wi = std::sin(angle);
        double cr = 1.0, ci = 0.0;  // current phasor
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            re += samples[t] * cr;
            im += samples[t] * ci;
            const double nr = cr * wr - ci * wi;
            ci = cr * wi + ci * wr;
            cr = nr;
        }
        r.magnitudes[kk - 1] = std::hypot(re, im);
    }
    double sum = 0.0, mx = 0.0;
    for (double m : r.magnitudes) {
        sum += m;
        mx = std::max(mx, m);
    }
    const double mean = sum / static_cast<double>(half);
    r.flatness = mean > 0.0 ? mx / mean : 0.0;
    r.pass = r.flatness < threshold;
    return r;
}

SpectralResult spectral_flatness(std::span<const std::uint64_t> samples, double threshold) {
    std::vector<double> d(samples.begin(), samples.end());
    return spectral_flatness(std::span<const double>(d), threshold);
}

}  // namespace tracelab::rng
