#include "qsearch/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qsearch/rng.hpp"
#include "qsearch/stats.hpp"

namespace qsearch {

namespace {

// Margin for the cheap log-odds pre-check; the decision itself is made on the
// posterior so that event posteriors satisfy the thresholds exactly.
constexpr double kLogOddsGuard = 1e-9;

SearchOutcome run_trial(const ModelParams& params, const StrategyConfig& cfg, std::uint64_t seed,
                        std::uint64_t trial_index, std::vector<SearchEvent>* events) {
    NormalStream rng(seed, trial_index);
    const double prior = params.prior;
    const double dt = cfg.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double half_dt = 0.5 * dt;
    const double switch_level = prior - cfg.eps2;
    const double logit_prior = logit(prior);
    const double stop_log_odds = logit(cfg.pi_star) - logit_prior;
    const double switch_log_odds = logit(switch_level) - logit_prior;
    const auto max_steps = static_cast<std::uint64_t>(std::floor(cfg.max_time / dt));

    ChannelState channel{0, rng.bernoulli(prior) ? 1 : 0, 0.0};
    SearchOutcome out;
    std::uint64_t step = 0;
    while (true) {
        if (step >= max_steps) {
            out.truncated = true;
            break;
        }
        ++step;
        const double dxi = channel.theta * dt + sqrt_dt * rng();
        channel.log_odds += dxi - half_dt;

        if (channel.log_odds >= stop_log_odds - kLogOddsGuard) {
            const double post = channel.posterior(prior);
            if (post >= cfg.pi_star) {
                if (events) events->push_back({SearchEventKind::stop, static_cast<double>(step) * dt, post});
                break;
            }
        } else if (channel.log_odds <= switch_log_odds + kLogOddsGuard) {
            const double post = channel.posterior(prior);
            if (post <= switch_level) {
                if (events) {
                    events->push_back({SearchEventKind::switch_channel, static_cast<double>(step) * dt, post});
                }
                channel = ChannelState{channel.index + 1, rng.bernoulli(prior) ? 1 : 0, 0.0};
                ++out.switches;
            }
        }
    }
    out.tau = static_cast<double>(step) * dt;
    out.chosen_theta = channel.theta;
    out.cost = params.c * out.tau + (channel.theta == 0 ? 1.0 : 0.0);
    return out;
}

}  // namespace

void StrategyConfig::validate(const ModelParams& params) const {
    params.validate();
    if (!(eps2 > 0.0 && params.prior - eps2 > 0.0)) {
        throw std::invalid_argument("switch offset eps2 must lie in (0, pi_hat), got " + std::to_string(eps2));
    }
    if (!(pi_star > params.prior && pi_star < 1.0)) {
        throw std::invalid_argument("pi_star must lie in (pi_hat, 1), got " + std::to_string(pi_star));
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
    if (!(max_time >= dt) || !std::isfinite(max_time)) {
        throw std::invalid_argument("max_time must be finite and >= dt");
    }
}

StrategyConfig make_strategy(const ModelParams& params, const ThresholdSolution& sol, double eps2, double dt) {
    StrategyConfig cfg;
    cfg.pi_star = sol.pi_star;
    cfg.eps2 = eps2;
    cfg.dt = dt;
    cfg.max_time = 1e4 * expected_hitting_time(params.prior, params.prior, sol.pi_star);
    cfg.validate(params);
    return cfg;
}

double ChannelState::odds() const { return std::exp(log_odds); }

double ChannelState::posterior(double prior) const { return posterior_from_log_odds(prior, log_odds); }

double posterior_from_log_odds(double prior, double log_odds) {
    if (log_odds > 0.0) {
        return prior / (prior + (1.0 - prior) * std::exp(-log_odds));
    }
    const double weighted = prior * std::exp(log_odds);
    return weighted / (weighted + 1.0 - prior);
}

SearchOutcome run_search_trial(const ModelParams& params, const StrategyConfig& cfg, std::uint64_t seed,
                               std::uint64_t trial_index) {
    cfg.validate(params);
    return run_trial(params, cfg, seed, trial_index, nullptr);
}

SearchOutcome run_search_trial(const ModelParams& params, const StrategyConfig& cfg, std::uint64_t seed,
                               std::uint64_t trial_index, std::vector<SearchEvent>& events) {
    cfg.validate(params);
    return run_trial(params, cfg, seed, trial_index, &events);
}

std::vector<SearchOutcome> search_trials(const ModelParams& params, const StrategyConfig& cfg, std::size_t n,
                                         std::uint64_t base_seed, kernels::Exec exec) {
    cfg.validate(params);
    return kernels::map_paths<SearchOutcome>(
        n, exec, [&](std::size_t i) { return run_trial(params, cfg, base_seed, i, nullptr); });
}

SearchRiskEstimate summarize_search(const StrategyConfig& cfg, const std::vector<SearchOutcome>& outcomes) {
    const std::size_t n = outcomes.size();
    std::vector<double> cost(n), error(n), tau(n), switches(n);
    SearchRiskEstimate est;
    for (std::size_t i = 0; i < n; ++i) {
        cost[i] = outcomes[i].cost;
        error[i] = outcomes[i].chosen_theta == 0 ? 1.0 : 0.0;
        tau[i] = outcomes[i].tau;
        switches[i] = static_cast<double>(outcomes[i].switches);
        if (outcomes[i].truncated) ++est.truncated;
    }
    const auto cost_s = stats::summarize(cost);
    const auto error_s = stats::summarize(error);
    const auto tau_s = stats::summarize(tau);
    est.risk = RiskEstimate{cost_s.mean, cost_s.std_err, n, cfg.dt};
    est.p_error = error_s.mean;
    est.p_error_se = error_s.std_err;
    est.mean_tau = tau_s.mean;
    est.mean_tau_se = tau_s.std_err;
    est.mean_switches = stats::compensated_sum(switches) / static_cast<double>(n);
    return est;
}

SearchRiskEstimate estimate_search_risk(const ModelParams& params, const StrategyConfig& cfg, std::size_t n,
                                        std::uint64_t base_seed, kernels::Exec exec) {
    if (n < 100) throw std::invalid_argument("need at least 100 trials, got " + std::to_string(n));
    return summarize_search(cfg, search_trials(params, cfg, n, base_seed, exec));
}

std::vector<double> reconstruct_observed_brownian(const ModelParams& params, const StrategyConfig& cfg,
                                                  std::uint64_t seed, double horizon) {
    cfg.validate(params);
    const SimGrid grid{cfg.dt, horizon, seed};
    const std::size_t steps = grid.steps();
    NormalStream rng(seed, 0);
    const double prior = params.prior;
    const double switch_level = prior - cfg.eps2;
    const double sqrt_dt = std::sqrt(cfg.dt);

    std::vector<double> increments(steps);
    ChannelState channel{0, rng.bernoulli(prior) ? 1 : 0, 0.0};
    for (std::size_t i = 0; i < steps; ++i) {
        const double predicted = channel.posterior(prior);
        const double dxi = channel.theta * cfg.dt + sqrt_dt * rng();
        increments[i] = dxi - predicted * cfg.dt;
        channel.log_odds += dxi - 0.5 * cfg.dt;
        if (channel.posterior(prior) <= switch_level) {
            channel = ChannelState{channel.index + 1, rng.bernoulli(prior) ? 1 : 0, 0.0};
        }
    }
    return increments;
}

ChannelTrace trace_single_channel(const ModelParams& params, std::optional<int> theta, const SimGrid& grid,
                                  std::uint64_t path_index) {
    params.validate();
    if (theta && *theta != 0 && *theta != 1) throw std::invalid_argument("theta must be 0 or 1");
    const std::size_t steps = grid.steps();
    NormalStream rng(grid.seed, path_index);
    ChannelTrace trace;
    trace.theta = theta ? *theta : (rng.bernoulli(params.prior) ? 1 : 0);
    trace.posterior.reserve(steps + 1);
    trace.innovations.reserve(steps);
    const double sqrt_dt = std::sqrt(grid.dt);
    double log_odds = 0.0;
    trace.posterior.push_back(params.prior);
    for (std::size_t i = 0; i < steps; ++i) {
        const double dxi = trace.theta * grid.dt + sqrt_dt * rng();
        trace.innovations.push_back(dxi - trace.posterior.back() * grid.dt);
        log_odds += dxi - 0.5 * grid.dt;
        trace.posterior.push_back(posterior_from_log_odds(params.prior, log_odds));
    }
    return trace;
}

}  // namespace qsearch
