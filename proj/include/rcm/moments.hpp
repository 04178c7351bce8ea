#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rcm/model.hpp"

namespace rcm {

struct PathCountSamples {
    int k = 3;
    std::vector<std::uint64_t> counts; // one sigma_k per replication
    ModelParams params;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class BracketSide { UpperBound, LowerBound };

std::string_view to_string(BracketSide side);

// Truncation at order m of P(sigma = 0) = sum_i (-1)^i E[C(sigma, i)].
struct ExistenceBracket {
    int order = 0;
    double partial_sum = 0.0;        // estimate of P(sigma = 0)
    BracketSide side = BracketSide::UpperBound; // relative to P(sigma = 0); upper iff order is even
    double existence_estimate = 1.0; // 1 - partial_sum
};

// Sample mean of the falling factorial (sigma)_i, exact per sample.
double empirical_factorial_moment(const PathCountSamples& samples, int i);

ExistenceBracket truncated_zero_probability(const PathCountSamples& samples, int m);

// One bracket per requested order, sharing the binomial work.
std::vector<ExistenceBracket> existence_brackets(const PathCountSamples& samples, std::span<const int> orders);

// sum_{i=0}^{m} (-1)^i C(sigma, i) in exact arithmetic, returned as a double.
double alternating_binomial_partial_sum(std::uint64_t sigma, int m);

// 1 - [2 mean - mean^2 - variance], evaluated literally and never clamped.
double theorem4_bound(double mean, double variance);

// (3/2) mean - variance/2 - mean^2/2: order-2 truncation of P(sigma > 0)
// using E(sigma)_2 = variance + mean^2 - mean. Not clamped.
double bonferroni_bound_order2(double mean, double variance);

struct SampleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0; // unbiased
    double mean_se = 0.0;
    double variance_se = 0.0;
    double zero_frequency = 0.0;
    double zero_frequency_se = 0.0;
    std::uint64_t max = 0;

    double dispersion_index() const { return mean > 0.0 ? variance / mean : 0.0; }
};

SampleSummary summarize(std::span<const std::uint64_t> counts);

// Mean and standard error of a real-valued sample.
struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;
};
MeanEstimate mean_and_se(std::span<const double> values);

} // namespace rcm
