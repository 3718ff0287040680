#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "qsearch/kernels.hpp"
#include "qsearch/search.hpp"
#include "qsearch/sde.hpp"
#include "qsearch/stats.hpp"

using namespace qsearch;

namespace {

const ModelParams kParams = ModelParams::make(0.1, 0.5);

StrategyConfig strategy(double eps2, double dt = 1e-3) {
    return make_strategy(kParams, solve_threshold(kParams), eps2, dt);
}

}  // namespace

TEST(PosteriorFromLogOdds, ValuesAndExtremes) {
    EXPECT_DOUBLE_EQ(posterior_from_log_odds(0.3, 0.0), 0.3);
    EXPECT_DOUBLE_EQ(posterior_from_log_odds(0.5, std::log(3.0)), 0.75);
    EXPECT_EQ(posterior_from_log_odds(0.5, 1e4), 1.0);
    EXPECT_EQ(posterior_from_log_odds(0.5, -1e4), 0.0);
    ChannelState ch{0, 1, std::log(3.0)};
    EXPECT_DOUBLE_EQ(ch.odds(), 3.0);
    EXPECT_DOUBLE_EQ(ch.posterior(0.5), 0.75);
}

TEST(StrategyConfig, Validation) {
    const auto sol = solve_threshold(kParams);
    EXPECT_THROW(make_strategy(kParams, sol, 0.5, 1e-3), std::invalid_argument);
    EXPECT_THROW(make_strategy(kParams, sol, 0.0, 1e-3), std::invalid_argument);
    EXPECT_THROW(make_strategy(kParams, sol, 0.05, 0.0), std::invalid_argument);
    const auto cfg = make_strategy(kParams, sol, 0.05, 1e-3);
    EXPECT_NEAR(cfg.max_time, 1e4 * expected_hitting_time(0.5, 0.5, sol.pi_star), 1e-6);
}

TEST(SearchTrial, EventsRespectThresholds) {
    const auto cfg = strategy(0.05);
    std::size_t total_switches = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        std::vector<SearchEvent> events;
        const auto out = run_search_trial(kParams, cfg, 17, i, events);
        ASSERT_FALSE(out.truncated);
        ASSERT_EQ(events.size(), out.switches + 1);
        double last_t = 0.0;
        for (std::size_t k = 0; k < events.size(); ++k) {
            EXPECT_GT(events[k].t, last_t);
            last_t = events[k].t;
            if (k + 1 < events.size()) {
                EXPECT_EQ(events[k].kind, SearchEventKind::switch_channel);
                EXPECT_LE(events[k].posterior, kParams.prior - cfg.eps2);
            } else {
                EXPECT_EQ(events[k].kind, SearchEventKind::stop);
                EXPECT_GE(events[k].posterior, cfg.pi_star);
                EXPECT_EQ(events[k].t, out.tau);
            }
        }
        EXPECT_DOUBLE_EQ(out.cost, kParams.c * out.tau + (out.chosen_theta == 0 ? 1.0 : 0.0));
        total_switches += out.switches;
    }
    EXPECT_GT(total_switches, 0u);
}

TEST(SearchTrial, TruncatesAtMaxTime) {
    auto cfg = strategy(0.05);
    cfg.max_time = 0.01;
    const auto out = run_search_trial(kParams, cfg, 3, 0);
    EXPECT_TRUE(out.truncated);
    EXPECT_NEAR(out.tau, 0.01, 1e-12);
}

TEST(SearchTrials, DeterministicAndSerialMatchesParallel) {
    const auto cfg = strategy(0.05);
    const auto a = search_trials(kParams, cfg, 300, 9, kernels::Exec::serial);
    const auto b = search_trials(kParams, cfg, 300, 9, kernels::Exec::parallel);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].tau, b[i].tau);
        ASSERT_EQ(a[i].switches, b[i].switches);
        ASSERT_EQ(a[i].cost, b[i].cost);
        const auto single = run_search_trial(kParams, cfg, 9, i);
        ASSERT_EQ(single.tau, a[i].tau);
    }
    const auto c = search_trials(kParams, cfg, 300, 10, kernels::Exec::parallel);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].tau != c[i].tau;
    EXPECT_TRUE(differs);
}

TEST(SearchRisk, DecompositionAndErrorBound) {
    const auto cfg = strategy(0.05);
    const auto est = estimate_search_risk(kParams, cfg, 4000, 21);
    EXPECT_NEAR(est.risk.mean, est.p_error + kParams.c * est.mean_tau, 1e-12);
    EXPECT_LE(est.p_error, 1.0 - cfg.pi_star + 2.0 * est.p_error_se);
    EXPECT_EQ(est.truncated, 0u);
    EXPECT_GT(est.mean_switches, 0.0);
    EXPECT_THROW(estimate_search_risk(kParams, cfg, 50, 21), std::invalid_argument);
}

TEST(ChannelTrace, PathwiseMatchesUnreflectedScheme) {
    const SimGrid grid{1e-3, 2.0, 8};
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto trace = trace_single_channel(kParams, std::nullopt, grid, i);
        const auto path = simulate_unreflected_driven(kParams, grid.dt, kParams.prior, trace.innovations);
        ASSERT_EQ(path.size(), trace.posterior.size());
        for (std::size_t k = 0; k < path.size(); ++k) {
            ASSERT_NEAR(path.values[k], trace.posterior[k], 1e-9) << "path " << i << " step " << k;
        }
    }
    EXPECT_THROW(trace_single_channel(kParams, 2, grid), std::invalid_argument);
}

TEST(ChannelTrace, TerminalLawMatchesUnreflected) {
    const SimGrid grid{1e-2, 1.0, 14};
    const std::size_t n = 20000;
    const auto traced = kernels::map_paths<double>(n, kernels::Exec::parallel, [&](std::size_t i) {
        return trace_single_channel(kParams, std::nullopt, grid, i).posterior.back();
    });
    SimGrid other = grid;
    other.seed = 99;
    const auto simulated =
        kernels::terminal_values(kParams, {kernels::PathKind::unreflected, kParams.prior, 0.0}, other, n);
    EXPECT_LE(stats::ks_distance(traced, simulated), 0.02);
    const auto s = stats::summarize(traced);
    EXPECT_NEAR(s.mean, kParams.prior, 3.0 * s.std_err);
}

TEST(ObservedBrownian, IncrementStatistics) {
    const auto cfg = strategy(0.05);
    const double horizon = 100.0;
    const auto dw = reconstruct_observed_brownian(kParams, cfg, 5, horizon);
    ASSERT_EQ(dw.size(), 100000u);
    const auto s = stats::summarize(dw);
    const double n = static_cast<double>(dw.size());
    EXPECT_NEAR(s.mean, 0.0, 3.0 * s.std_err);
    // Var of the sample variance of N(0, dt) is 2 dt^2 / (n - 1).
    EXPECT_NEAR(s.variance, cfg.dt, 3.0 * cfg.dt * std::sqrt(2.0 / (n - 1.0)));
    EXPECT_NEAR(stats::lag1_autocorrelation(dw), 0.0, 3.0 / std::sqrt(n));
    EXPECT_EQ(dw, reconstruct_observed_brownian(kParams, cfg, 5, horizon));
}
