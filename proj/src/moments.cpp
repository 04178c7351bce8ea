#include "rcm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/multiprecision/cpp_int.hpp>

#include "rcm/errors.hpp"

namespace rcm {

namespace {

using BigInt = boost::multiprecision::cpp_int;

std::map<std::uint64_t, std::uint64_t> histogram(const std::vector<std::uint64_t>& counts) {
    std::map<std::uint64_t, std::uint64_t> h;
    for (auto c : counts) ++h[c];
    return h;
}

double ratio(const BigInt& numerator, std::size_t n) {
    // Exact integer numerator; a single rounding at the end.
    using boost::multiprecision::cpp_rational;
    return cpp_rational(numerator, BigInt(n)).convert_to<double>();
}

// sum_{i=0}^{m} (-1)^i C(sigma, i) for every m in [0, max_order].
std::vector<BigInt> alternating_sums(std::uint64_t sigma, int max_order) {
    std::vector<BigInt> out(static_cast<std::size_t>(max_order) + 1);
    BigInt binom = 1;
    BigInt running = 0;
    for (int i = 0; i <= max_order; ++i) {
        if (static_cast<std::uint64_t>(i) <= sigma) {
            if (i > 0) {
                binom *= sigma - static_cast<std::uint64_t>(i) + 1;
                binom /= static_cast<unsigned>(i);
            }
            if (i % 2 == 0) running += binom;
            else running -= binom;
        }
        out[static_cast<std::size_t>(i)] = running;
    }
    return out;
}

} // namespace

void PathCountSamples::validate() const {
    if (counts.empty()) throw ValidationError("path count samples: need at least one replication");
    if (k < 1) throw ValidationError("path count samples: k must be at least 1");
}

std::string_view to_string(BracketSide side) {
    return side == BracketSide::UpperBound ? "upper_bound" : "lower_bound";
}

double empirical_factorial_moment(const PathCountSamples& samples, int i) {
    samples.validate();
    if (i < 0) throw ValidationError("factorial moment order must be nonnegative");
    BigInt total = 0;
    for (auto [sigma, mult] : histogram(samples.counts)) {
        if (sigma < static_cast<std::uint64_t>(i)) continue;
        BigInt falling = 1;
        for (int j = 0; j < i; ++j) falling *= sigma - static_cast<std::uint64_t>(j);
        total += falling * mult;
    }
    return ratio(total, samples.counts.size());
}

std::vector<ExistenceBracket> existence_brackets(const PathCountSamples& samples, std::span<const int> orders) {
    samples.validate();
    if (orders.empty()) return {};
    if (*std::min_element(orders.begin(), orders.end()) < 0) {
        throw ValidationError("bracket order must be nonnegative");
    }
    const int max_order = *std::max_element(orders.begin(), orders.end());
    std::vector<BigInt> totals(static_cast<std::size_t>(max_order) + 1, 0);
    for (auto [sigma, mult] : histogram(samples.counts)) {
        const auto sums = alternating_sums(sigma, max_order);
        for (std::size_t m = 0; m < sums.size(); ++m) totals[m] += sums[m] * mult;
    }
    std::vector<ExistenceBracket> out;
    out.reserve(orders.size());
    for (int m : orders) {
        ExistenceBracket b;
        b.order = m;
        b.partial_sum = ratio(totals[static_cast<std::size_t>(m)], samples.counts.size());
        b.side = m % 2 == 0 ? BracketSide::UpperBound : BracketSide::LowerBound;
        b.existence_estimate = 1.0 - b.partial_sum;
        out.push_back(b);
    }
    return out;
}

ExistenceBracket truncated_zero_probability(const PathCountSamples& samples, int m) {
    const int orders[] = {m};
    return existence_brackets(samples, orders).front();
}

double alternating_binomial_partial_sum(std::uint64_t sigma, int m) {
    if (m < 0) throw ValidationError("bracket order must be nonnegative");
    return alternating_sums(sigma, m).back().convert_to<double>();
}

double theorem4_bound(double mean, double variance) {
    return 1.0 - (2.0 * mean - mean * mean - variance);
}

double bonferroni_bound_order2(double mean, double variance) {
    return 1.5 * mean - 0.5 * variance - 0.5 * mean * mean;
}

SampleSummary summarize(std::span<const std::uint64_t> counts) {
    SampleSummary s;
    s.n = counts.size();
    if (s.n == 0) return s;
    const double n = static_cast<double>(s.n);
    double sum = 0.0;
    std::size_t zeros = 0;
    for (auto c : counts) {
        sum += static_cast<double>(c);
        zeros += c == 0 ? 1 : 0;
        s.max = std::max(s.max, c);
    }
    s.mean = sum / n;
    double m2 = 0.0, m4 = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - s.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    s.zero_frequency = static_cast<double>(zeros) / n;
    if (s.n >= 2) {
        s.variance = m2 / (n - 1.0);
        s.mean_se = std::sqrt(s.variance / n);
        // Large-sample variance of the sample variance: (mu4 - sigma^4) / n.
        const double mu2 = m2 / n;
        const double mu4 = m4 / n;
        s.variance_se = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / n);
        s.zero_frequency_se = std::sqrt(s.zero_frequency * (1.0 - s.zero_frequency) / (n - 1.0));
    }
    return s;
}

MeanEstimate mean_and_se(std::span<const double> values) {
    MeanEstimate e;
    if (values.empty()) return e;
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    e.mean = sum / n;
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - e.mean) * (v - e.mean);
        e.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

} // namespace rcm
