// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/io/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tracelab/errors.hpp"

namespace tracelab::io {

std::string correlation_csv(const cpa::CorrelationMatrix& c) {
    std::ostringstream os;
    os << "guess";
    for (std::size_t j = 0; j < c.samples(); ++j) os << ",s" << j;
    os << "\n";
    for (std::size_t g = 0; g < c.guesses(); ++g) {
        os << g;
        for (std::size_t j = 0; j < c.samples(); ++j) {
            os << ',';
            if (c.defined(g, j))
                os << c.c(g, j);
            else
                os << "undefined";
        }
        os << "\n";
    }
    return os.str();
}

std::string sweep_csv(const cpa::SweepTrajectory& sweep) {
    std::ostringstream os;
    os << "guess";
    for (std::size_t n : sweep.counts) os << ",n" << n;
    os << "\n";
    for (std::size_t g = 0; g < sweep.peak_scores.cols(); ++g) {
        os << g;
        for (std::size_t p = 0; p < sweep.counts.size(); ++p) {
            os << ',';
            const double v = sweep.peak_scores(p, g);
            if (v >= 0.0)
                os << v;
            else
                os << "undefined";
        }
        os << "\n";
    }
    return os.str();
}

std::string histogram_csv(std::span<const std::uint64_t> counts) {
    std::ostringstream os;
    os << "bin,count\n";
    for (std::size_t i = 0; i < counts.size(); ++i) os << i << ',' << counts[i] << "\n";
    return os.str();
}

std::string spectrum_csv(std::span<const double> magnitudes) {
    std::ostringstream os;
    os << "bin,magnitude\n";
    for (std::size_t i = 0; i < magnitudes.size(); ++i)
        os << (i + 1) << ',' << magnitudes[i] << "\n";
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw format_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw format_error("short write to " + path);
}

}  // namespace tracelab::io
