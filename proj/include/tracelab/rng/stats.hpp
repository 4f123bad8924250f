// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tracelab::rng {

struct ChiSquareResult {
    double statistic = 0.0;
    double critical = 0.0;
    bool pass = false;
};

// Pearson chi-square of the sample distribution against a uniform
// expectation over equal-width bins spanning the observed value range.
// Requires at least 10 samples per bin.  Critical values come from a fixed
// table; supported bin counts are {2,4,8,10,16,32,50,64,100,128,200,256}
// and significances {0.01, 0.05}.
ChiSquareResult chi_square_uniformity(std::span<const std::uint64_t> samples,
                                      unsigned bins, double significance = 0.01);

struct SpectralResult {
    double flatness = 0.0;  // max magnitude / mean magnitude, DC excluded
    bool pass = false;
    std::vector<double> magnitudes;  // bins 1 .. n/2
};

// Discrete Fourier magnitudes of the sequence with the zero-frequency term
// excluded.  A flat (white) spectrum passes; a periodic sequence produces a
// dominant line and fails.  Requires at least 256 samples.
SpectralResult spectral_flatness(std::span<const double> samples, double threshold = 10.0);
SpectralResult spectral_flatness(std::span<const std::uint64_t> samples, double threshold = 10.0);

// Equal-width histogram over [min, max] of the samples; counts sum to the
// sample count.  A zero-width range puts everything into bin 0.
std::vector<std::uint64_t> histogram(std::span<const std::uint64_t> samples, unsigned bins);

}  // namespace tracelab::rng
