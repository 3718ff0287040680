#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qsearch/analysis.hpp"
#include "qsearch/kernels.hpp"
#include "qsearch/model.hpp"

namespace qsearch {

// Threshold strategy: observe the current channel, discard it once its
// posterior falls to pi_hat - eps2, accept it once the posterior reaches pi_star.
struct StrategyConfig {
    double pi_star = 0.0;
    double eps2 = 0.0;
    double dt = 1e-4;
    double max_time = 0.0;

    void validate(const ModelParams& params) const;
};

// Strategy with max_time = 1e4 * E[tau] of the reflected problem.
StrategyConfig make_strategy(const ModelParams& params, const ThresholdSolution& sol, double eps2, double dt);

struct ChannelState {
    std::size_t index = 0;
    int theta = 0;          // hidden drift, 0 or 1
    double log_odds = 0.0;  // log Phi_t = xi_t - t/2 since the channel was picked

    double odds() const;
    double posterior(double prior) const;
};

// pi_hat Phi / (pi_hat Phi + 1 - pi_hat), evaluated without overflowing Phi.
double posterior_from_log_odds(double prior, double log_odds);

struct SearchOutcome {
    double tau = 0.0;
    std::size_t switches = 0;
    int chosen_theta = 0;
    double cost = 0.0;  // c tau + 1{chosen_theta = 0}
    bool truncated = false;
};

enum class SearchEventKind { switch_channel, stop };

struct SearchEvent {
    SearchEventKind kind;
    double t = 0.0;
    double posterior = 0.0;  // posterior of the channel at the moment of the event
};

// One trial on the stream (seed, trial_index). Fresh channels have
// P(theta = 1) = pi_hat; discarded channels are never revisited.
SearchOutcome run_search_trial(const ModelParams& params, const StrategyConfig& cfg, std::uint64_t seed,
                               std::uint64_t trial_index = 0);
SearchOutcome run_search_trial(const ModelParams& params, const StrategyConfig& cfg, std::uint64_t seed,
                               std::uint64_t trial_index, std::vector<SearchEvent>& events);

std::vector<SearchOutcome> search_trials(const ModelParams& params, const StrategyConfig& cfg, std::size_t n,
                                         std::uint64_t base_seed,
                                         kernels::Exec exec = kernels::Exec::parallel);

struct SearchRiskEstimate {
    RiskEstimate risk;
    double p_error = 0.0;  // fraction of trials accepting a theta = 0 channel
    double p_error_se = 0.0;
    double mean_tau = 0.0;
    double mean_tau_se = 0.0;
    double mean_switches = 0.0;
    std::size_t truncated = 0;
};

SearchRiskEstimate summarize_search(const StrategyConfig& cfg, const std::vector<SearchOutcome>& outcomes);

// Requires n >= 100.
SearchRiskEstimate estimate_search_risk(const ModelParams& params, const StrategyConfig& cfg, std::size_t n,
                                        std::uint64_t base_seed, kernels::Exec exec = kernels::Exec::parallel);

// Innovation increments dxi - pi dt of whichever channel is observed under the
// switching rule (no stopping) over [0, horizon], concatenated across switches.
std::vector<double> reconstruct_observed_brownian(const ModelParams& params, const StrategyConfig& cfg,
                                                  std::uint64_t seed, double horizon);

// Single channel observed without switching or stopping.
struct ChannelTrace {
    int theta = 0;
    std::vector<double> posterior;    // posterior[0] = pi_hat
    std::vector<double> innovations;  // dxi_i - posterior[i] dt
};

// theta is drawn from the prior when not given.
ChannelTrace trace_single_channel(const ModelParams& params, std::optional<int> theta, const SimGrid& grid,
                                  std::uint64_t path_index = 0);

}  // namespace qsearch
