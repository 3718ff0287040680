#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qsearch::stats {

struct Summary {
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance
    double std_err = 0.0;   // sqrt(variance / n)
    std::size_t n = 0;
};

// Neumaier-compensated sum; the order of `xs` fixes the result bit-for-bit.
double compensated_sum(std::span<const double> xs);

// Two-pass mean/variance. Throws std::invalid_argument if xs.size() < 2.
Summary summarize(std::span<const double> xs);

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_distance(std::vector<double> a, std::vector<double> b);

// Sample lag-1 autocorrelation.
double lag1_autocorrelation(std::span<const double> xs);

}  // namespace qsearch::stats
