// Copyright tracelab contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "tracelab/cpa/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tracelab/cipher/aes128.hpp"
#include "tracelab/cipher/speck128.hpp"
#include "tracelab/errors.hpp"

namespace tracelab::cpa {

namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

std::uint8_t byte_of(std::uint64_t word, unsigned index) {
    return static_cast<std::uint8_t>(word >> (8 * index));
}

// Streaming accumulators for one trace column.
struct ColumnSums {
    double w = 0.0;
    double ww = 0.0;
};

// rho from the five accumulators; NaN when either variance term vanishes.
// The guard is relative so that a constant column whose sums do not cancel
// exactly in floating point still counts as zero variance.
double rho_from_sums(double n, double sw, double sww, double sh, double shh, double swh) {
    const double vw = n * sww - sw * sw;
    const double vh = n * shh - sh * sh;
    if (vw <= 1e-12 * n * sww || vh <= 1e-12 * n * shh) return kUndefined;
    return (n * swh - sw * sh) / (std::sqrt(vw) * std::sqrt(vh));
}

// Accesses trace samples either from a double matrix or from a TraceSet.
struct MatrixRows {
    const Matrix& w;
    std::size_t rows() const { return w.rows(); }
    std::size_t cols() const { return w.cols(); }
    double at(std::size_t i, std::size_t j) const { return w(i, j); }
};

struct TraceRows {
    const sim::TraceSet& set;
    std::size_t rows() const { return set.traces.size(); }
    std::size_t cols() const { return set.samples_per_trace(); }
    double at(std::size_t i, std::size_t j) const {
        return static_cast<double>(set.traces[i].samples[j]);
    }
};

template <typename Rows>
CorrelationMatrix correlate_impl(const Rows& w, const Matrix& h) {
    const std::size_t n = w.rows();
    const std::size_t m = w.cols();
    const std::size_t guesses = h.cols();
    if (n < 2) throw degenerate_data_error("correlation needs at least two traces");
    if (h.rows() != n) throw invalid_operand_error("trace and hypothesis row counts differ");

    std::vector<ColumnSums> col(m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double x = w.at(i, j);
            col[j].w += x;
            col[j].ww += x * x;
        }

    CorrelationMatrix out;
    out.c = Matrix(guesses, m);
#pragma omp parallel for schedule(static)
    for (long long g = 0; g < static_cast<long long>(guesses); ++g) {
        double sh = 0.0, shh = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = h(i, static_cast<std::size_t>(g));
            sh += v;
            shh += v * v;
        }
        std::vector<double> swh(m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = h(i, static_cast<std::size_t>(g));
            double* acc = swh.data();
            for (std::size_t j = 0; j < m; ++j) acc[j] += v * w.at(i, j);
        }
        for (std::size_t j = 0; j < m; ++j)
            out.c(static_cast<std::size_t>(g), j) =
                rho_from_sums(static_cast<double>(n), col[j].w, col[j].ww, sh, shh, swh[j]);
    }
    return out;
}

}  // namespace

std::uint8_t apply_selection(const SelectionModel& model, const Block128& plaintext,
                             unsigned guess, unsigned byte_index) {
    const bool aes = model.kind == SelectionKind::aes_sbox || model.kind == SelectionKind::aes_xor;
    if (byte_index >= (aes ? 16u : 8u))
        throw invalid_operand_error("byte index out of range for the selection kind");
    if (guess > 255) throw invalid_operand_error("guess must be a byte");
    switch (model.kind) {
        case SelectionKind::aes_sbox:
            return cipher::AES_SBOX[plaintext[byte_index] ^ guess];
        case SelectionKind::aes_xor:
            return static_cast<std::uint8_t>(plaintext[byte_index] ^ guess);
        case SelectionKind::speck_r1: {
            auto [pt1, pt2] = block_to_words(plaintext);
            const std::uint64_t t = cipher::ror64(pt1, 8) + pt2;
            return static_cast<std::uint8_t>(byte_of(t, byte_index) ^ guess);
        }
        case SelectionKind::speck_r2: {
            if (!model.k2)
                throw config_error("speck_r2 selection requires the phase-1 K2 context");
            auto [pt1, pt2] = block_to_words(plaintext);
            auto v = cipher::speck_round1_values(pt1, pt2, *model.k2);
            const std::uint64_t u = cipher::speck_round2_target(v.r1, v.y1);
            return static_cast<std::uint8_t>(byte_of(u, byte_index) ^ guess);
        }
    }
    throw config_error("unknown selection kind");
}

Matrix build_hypotheses(const sim::TraceSet& set, const SelectionModel& model,
                        unsigned byte_index) {
    const std::size_t n = set.traces.size();
    Matrix h(n, 256);
    for (std::size_t i = 0; i < n; ++i) {
        const Block128& pt = set.traces[i].plaintext;
        for (unsigned g = 0; g < 256; ++g)
            h(i, g) = sim::hamming_weight(apply_selection(model, pt, g, byte_index));
    }
    return h;
}

bool CorrelationMatrix::defined(std::size_t g, std::size_t j) const {
    return !std::isnan(c(g, j));
}

CorrelationMatrix pearson_correlate(const Matrix& w, const Matrix& h) {
    return correlate_impl(MatrixRows{w}, h);
}

CorrelationMatrix pearson_correlate(const sim::TraceSet& set, const Matrix& h) {
    return correlate_impl(TraceRows{set}, h);
}

const GuessScore& KeyRanking::of_guess(unsigned guess) const {
    for (const auto& e : entries)
        if (e.guess == guess) return e;
    throw invalid_operand_error("guess out of range");
}

KeyRanking rank_guesses(const CorrelationMatrix& c) {
    const std::size_t guesses = c.guesses();
    const std::size_t m = c.samples();
    KeyRanking r;
    r.entries.resize(guesses);
    bool any_defined = false;
    for (std::size_t g = 0; g < guesses; ++g) {
        GuessScore gs;
        gs.guess = static_cast<unsigned>(g);
        for (std::size_t j = 0; j < m; ++j) {
            if (!c.defined(g, j)) continue;
            const double a = std::fabs(c.c(g, j));
            if (a > gs.score) {
                gs.score = a;
                gs.peak_time = j;
                gs.signed_peak = c.c(g, j);
            }
        }
        if (gs.score >= 0.0) any_defined = true;
        r.entries[g] = gs;
    }
    if (!any_defined)
        throw degenerate_data_error("every correlation entry is undefined");
    // quantize at 1e-9 so the exactly anti-correlated complement of an xor
    // guess compares as a tie instead of by FP jitter
    auto quantized = [](double score) { return std::llround(score * 1e9); };
    std::stable_sort(r.entries.begin(), r.entries.end(),
                     [&](const GuessScore& a, const GuessScore& b) {
                         const auto qa = quantized(a.score), qb = quantized(b.score);
                         if (qa != qb) return qa > qb;
                         const bool pa = a.signed_peak > 0.0, pb = b.signed_peak > 0.0;
                         if (pa != pb) return pa;
                         return a.guess < b.guess;
                     });
    // the gap skips entries tying the top score: an exact tie is the
    // polarity mirror of the winner, not a competing key hypothesis
    r.gap = 0.0;
    for (std::size_t i = 1; i < r.entries.size(); ++i) {
        if (quantized(r.entries[i].score) == quantized(r.entries[0].score)) continue;
        r.gap = r.entries[0].score - r.entries[i].score;
        break;
    }
    return r;
}

KeyRanking attack_byte(const sim::TraceSet& set, const SelectionModel& model,
                       unsigned byte_index) {
    if (set.traces.empty()) throw degenerate_data_error("empty trace set");
    Matrix h = build_hypotheses(set, model, byte_index);
    return rank_guesses(pearson_correlate(set, h));
}

SweepTrajectory sweep_traces(const sim::TraceSet& set, const SelectionModel& model,
                             unsigned byte_index, const std::vector<std::size_t>& grid) {
    if (grid.empty()) throw config_error("sweep grid is empty");
    if (std::adjacent_find(grid.begin(), grid.end(),
                           [](std::size_t a, std::size_t b) { return a >= b; }) != grid.end())
        throw config_error("sweep grid must be strictly ascending");
    if (grid.back() > set.traces.size())
        throw config_error("sweep grid exceeds the trace count");

    const std::size_t m = set.samples_per_trace();
    Matrix h = build_hypotheses(set, model, byte_index);

    SweepTrajectory out;
    out.counts = grid;
    out.peak_scores = Matrix(grid.size(), 256, -1.0);
    out.peak_signed = Matrix(grid.size(), 256, 0.0);

    // prefix accumulators, extended trace by trace in canonical order
    std::vector<ColumnSums> col(m);
    std::vector<double> sh(256, 0.0), shh(256, 0.0);
    Matrix swh(256, m);

    std::size_t next_grid = 0;
    for (std::size_t i = 0; i < set.traces.size() && next_grid < grid.size(); ++i) {
        const float* samples = set.traces[i].samples.data();
        for (std::size_t j = 0; j < m; ++j) {
            const double x = samples[j];
            col[j].w += x;
            col[j].ww += x * x;
        }
        const double* hrow = h.row(i);
#pragma omp parallel for schedule(static)
        for (int g = 0; g < 256; ++g) {
            const double v = hrow[g];
            sh[g] += v;
            shh[g] += v * v;
            double* acc = swh.row(static_cast<std::size_t>(g));
            for (std::size_t j = 0; j < m; ++j) acc[j] += v * static_cast<double>(samples[j]);
        }
        if (i + 1 != grid[next_grid]) continue;

        const auto n = static_cast<double>(i + 1);
#pragma omp parallel for schedule(static)
        for (int g = 0; g < 256; ++g) {
            double best = -1.0, best_signed = 0.0;
            const double* acc = swh.row(static_cast<std::size_t>(g));
            for (std::size_t j = 0; j < m; ++j) {
                const double rho =
                    rho_from_sums(n, col[j].w, col[j].ww, sh[g], shh[g], acc[j]);
                if (!std::isnan(rho) && std::fabs(rho) > best) {
                    best = std::fabs(rho);
                    best_signed = rho;
                }
            }
            out.peak_scores(next_grid, static_cast<std::size_t>(g)) = best;
            out.peak_signed(next_grid, static_cast<std::size_t>(g)) = best_signed;
        }
        ++next_grid;
    }
    return out;
}

std::optional<std::size_t> minimal_stable_traces(const SweepTrajectory& sweep,
                                                 std::uint8_t true_byte) {
    auto quantized = [](double score) { return std::llround(score * 1e9); };
    std::optional<std::size_t> candidate;
    for (std::size_t p = 0; p < sweep.counts.size(); ++p) {
        const double mine = sweep.peak_scores(p, true_byte);
        const bool mine_pos = sweep.peak_signed(p, true_byte) > 0.0;
        bool first = mine >= 0.0;
        for (unsigned g = 0; g < 256 && first; ++g) {
            if (g == true_byte) continue;
            const double other = sweep.peak_scores(p, g);
            // same ordering as rank_guesses: quantized score, then positive
            // peak, then smaller guess value
            const auto qo = quantized(other), qm = quantized(mine);
            if (qo > qm) {
                first = false;
            } else if (qo == qm) {
                const bool other_pos = sweep.peak_signed(p, g) > 0.0;
                if (other_pos != mine_pos ? other_pos : g < true_byte) first = false;
            }
        }
        if (first) {
            if (!candidate) candidate = sweep.counts[p];
        } else {
            candidate.reset();
        }
    }
    return candidate;
}

std::optional<std::size_t> minimal_stable_traces(const sim::TraceSet& set,
                                                 const SelectionModel& model,
                                                 unsigned byte_index,
                                                 const std::vector<std::size_t>& grid,
                                                 std::uint8_t true_byte) {
    return minimal_stable_traces(sweep_traces(set, model, byte_index, grid), true_byte);
}

std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, double step) {
    if (lo < 2 || hi < lo) throw config_error("grid bounds must satisfy 2 <= lo <= hi");
    if (step <= 1.0) throw config_error("grid step must exceed 1");
    std::vector<std::size_t> grid;
    double x = static_cast<double>(lo);
    while (static_cast<std::size_t>(x) < hi) {
        auto v = static_cast<std::size_t>(x);
        if (grid.empty() || v > grid.back()) grid.push_back(v);
        x *= step;
    }
    if (grid.empty() || grid.back() != hi) grid.push_back(hi);
    return grid;
}

std::vector<std::size_t> default_grid(std::size_t lo, std::size_t hi) {
    return geometric_grid(lo, hi, 1.25);
}

}  // namespace tracelab::cpa
