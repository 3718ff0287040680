#include "qsearch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsearch::stats {

double compensated_sum(std::span<const double> xs) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

Summary summarize(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("summarize: need at least two samples");
    Summary s;
    s.n = xs.size();
    const double n = static_cast<double>(s.n);
    s.mean = compensated_sum(xs) / n;
    std::vector<double> sq(xs.size());
    std::transform(xs.begin(), xs.end(), sq.begin(), [&](double x) { return (x - s.mean) * (x - s.mean); });
    s.variance = compensated_sum(sq) / (n - 1.0);
    s.std_err = std::sqrt(s.variance / n);
    return s;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double lag1_autocorrelation(std::span<const double> xs) {
    if (xs.size() < 3) throw std::invalid_argument("lag1_autocorrelation: need at least three samples");
    const Summary s = summarize(xs);
    std::vector<double> prod(xs.size() - 1);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) prod[i] = (xs[i] - s.mean) * (xs[i + 1] - s.mean);
    const double cov = compensated_sum(prod) / static_cast<double>(xs.size());
    const double var = s.variance * (static_cast<double>(xs.size()) - 1.0) / static_cast<double>(xs.size());
    return cov / var;
}

}  // namespace qsearch::stats
