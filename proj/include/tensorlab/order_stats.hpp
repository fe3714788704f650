#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tensorlab/distributions.hpp"

namespace tensorlab {

// Nonincreasing rearrangement |X|^*_1 >= ... >= |X|^*_n.
struct RearrangedSample {
    std::vector<double> sorted_abs;
    SeedTrace source;
};

// k = t / ln_+(e n / t), with 1/0 = +infinity.
double threshold_k(double t, long n);

RearrangedSample rearrange(std::span<const double> values);

// sum_{i <= m} (X^*_i)^2; empty index set gives 0.
double head_sum(const RearrangedSample& r, long m);
// sum_{i > m} (X^*_i)^q
double tail_qsum(const RearrangedSample& r, long m, double q);

struct TailReport {
    double t = 0.0;
    long n = 0;
    double q = 2.0;
    double k = 0.0;  // +inf when t >= e n
    long trials = 0;
    double exceed_freq_head = 0.0;  // freq of head_sum > fitted_C_head * t
    double exceed_freq_tail = 0.0;  // freq of tail_qsum > fitted_C_tail * n
    double fitted_C_head = 0.0;     // (1 - 2 e^{-t})-quantile of head_sum / t
    double fitted_C_tail = 0.0;     // same quantile of tail_qsum / n
    double fitted_C_head_k = 0.0;   // head over i <= floor(k) instead of 3k
    std::uint64_t seed = 0;
};

// Samples `trials` batches of n i.i.d. draws of the psi2-normalized scalar
// law, accumulates the two sums of the order-statistics bound, and fits
// their constants as empirical quantiles at level 1 - 2 e^{-t}.
// trial_offset shifts the per-trial substreams so disjoint halves can be run.
TailReport verify_lemma(DistModel model_1d, long n, double t, double q,
                        long trials, std::uint64_t seed,
                        std::uint64_t trial_offset = 0);

// psi2 norm of the unit-variance 1-d law (used to rescale to psi2 = 1).
double scalar_psi2(DistModel model_1d);

}  // namespace tensorlab
