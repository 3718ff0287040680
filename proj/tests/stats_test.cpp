#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "qsearch/stats.hpp"

using namespace qsearch::stats;

TEST(CompensatedSum, RecoversCancelledTerms) {
    const std::vector<double> xs{1.0, 1e100, 1.0, -1e100};
    EXPECT_EQ(compensated_sum(xs), 2.0);
    EXPECT_EQ(compensated_sum(std::vector<double>{}), 0.0);
}

TEST(Summarize, KnownValues) {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto s = summarize(xs);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(s.std_err, std::sqrt(5.0 / 12.0));
    EXPECT_EQ(s.n, 4u);
    EXPECT_THROW(summarize(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(KsDistance, Cases) {
    EXPECT_EQ(ks_distance({1, 2, 3}, {1, 2, 3}), 0.0);
    EXPECT_EQ(ks_distance({1, 2}, {3, 4}), 1.0);
    EXPECT_DOUBLE_EQ(ks_distance({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5);
    EXPECT_DOUBLE_EQ(ks_distance({0.0}, {0.0, 1.0}), 0.5);
}

TEST(Lag1Autocorrelation, AlternatingAndConstantTrend) {
    std::vector<double> alt;
    for (int i = 0; i < 1000; ++i) alt.push_back(i % 2 ? 1.0 : -1.0);
    EXPECT_NEAR(lag1_autocorrelation(alt), -1.0, 2e-3);
    std::vector<double> ramp;
    for (int i = 0; i < 1000; ++i) ramp.push_back(i);
    EXPECT_GT(lag1_autocorrelation(ramp), 0.99);
}
