#include "qsearch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qsearch/stats.hpp"

namespace qsearch {

namespace {

// Antiderivative of 2 / (z^2 (1-z)^2).
double speed_antiderivative(double z) { return 2.0 * (-1.0 / z + 1.0 / (1.0 - z) + 2.0 * logit(z)); }

double log_coupling_coeff(double t) { return std::log(16.0) + std::log(t) + 32.0 * t; }

void require_sample_count(std::size_t n) {
    if (n < 100) throw std::invalid_argument("need at least 100 samples, got " + std::to_string(n));
}

}  // namespace

double speed_measure_mass(double pi_hat, double y) {
    if (!(pi_hat > 0.0 && pi_hat <= y && y < 1.0)) {
        throw std::domain_error("speed_measure_mass: need 0 < pi_hat <= y < 1");
    }
    return speed_antiderivative(y) - speed_antiderivative(pi_hat);
}

double expected_hitting_time(double pi_hat, double x, double b) {
    if (!(pi_hat > 0.0 && pi_hat <= x && x <= b && b < 1.0)) {
        throw std::domain_error("expected_hitting_time: need 0 < pi_hat <= x <= b < 1, got pi_hat=" +
                                std::to_string(pi_hat) + " x=" + std::to_string(x) + " b=" + std::to_string(b));
    }
    if (x == b) return 0.0;
    auto mass = [pi_hat](double y) { return speed_measure_mass(pi_hat, std::max(y, pi_hat)); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(mass, x, b, 20, 1e-10);
}

double coupling_bound(double t, double eps) {
    if (!(t > 0.0) || !(eps >= 0.0)) throw std::domain_error("coupling_bound: need t > 0 and eps >= 0");
    if (eps == 0.0) return 0.0;
    return std::exp(log_coupling_coeff(t) + 2.0 * std::log(eps)) + eps;
}

EpsilonPlan plan_epsilon_optimal(const ModelParams& params, double eps_target) {
    params.validate();
    if (!(eps_target > 0.0 && eps_target < 1.0)) {
        throw std::invalid_argument("eps_target must lie in (0, 1), got " + std::to_string(eps_target));
    }
    const ThresholdSolution sol = solve_threshold(params);

    EpsilonPlan plan;
    plan.eps_target = eps_target;
    plan.pi_star = sol.pi_star;
    plan.expected_tau = expected_hitting_time(params.prior, params.prior, sol.pi_star);
    plan.t_bound = 4.0 * plan.expected_tau / eps_target;
    plan.log_coupling_coeff = log_coupling_coeff(plan.t_bound);

    // Positive root of a r^2 + r = h with a = 16 t e^{32 t}, h = eps / 2.
    const double h = 0.5 * eps_target;
    const double a = std::exp(plan.log_coupling_coeff);
    double root = 0.0;
    if (std::isfinite(4.0 * a * h)) {
        root = 2.0 * h / (1.0 + std::sqrt(1.0 + 4.0 * a * h));
    } else {
        root = std::exp(0.5 * (std::log(h) - plan.log_coupling_coeff));
    }
    plan.eps2 = std::min(kPlanShrink * root, 0.5 * params.prior);
    plan.feasible = plan.eps2 > 0.0 && coupling_bound(plan.t_bound, plan.eps2) < h;
    if (!plan.feasible) plan.eps2 = 0.0;
    return plan;
}

RiskEstimate estimate_risk_at_threshold(const ModelParams& params, double threshold, const SimGrid& grid,
                                        std::size_t n, kernels::Exec exec) {
    params.validate();
    require_sample_count(n);
    const auto stops = kernels::reflected_stops(params, threshold, grid, n, exec);
    std::vector<double> cost(n);
    std::transform(stops.begin(), stops.end(), cost.begin(),
                   [&](const kernels::StopRecord& s) { return params.c * s.tau + (1.0 - s.value); });
    const auto summary = stats::summarize(cost);
    return RiskEstimate{summary.mean, summary.std_err, n, grid.dt};
}

RiskEstimate estimate_risk_reflected(const ModelParams& params, const ThresholdSolution& sol,
                                     const SimGrid& grid, std::size_t n, kernels::Exec exec) {
    return estimate_risk_at_threshold(params, sol.pi_star, grid, n, exec);
}

CouplingReport verify_coupling_bound(const ModelParams& params, double eps, double t, const SimGrid& grid,
                                     std::size_t n, kernels::Exec exec) {
    grid.validate();
    if (!(t > 0.0 && t <= grid.horizon)) {
        throw std::invalid_argument("coupling time t must lie in (0, horizon], got " + std::to_string(t));
    }
    if (n < 2) throw std::invalid_argument("need at least 2 coupled paths");
    SimGrid run = grid;
    run.horizon = std::max(t, grid.dt);
    const auto paths = kernels::coupled_stats(params, eps, run, n, exec);

    std::vector<double> state_sq(n), y_sq(n);
    CouplingReport report;
    for (std::size_t i = 0; i < n; ++i) {
        state_sq[i] = paths[i].sup_state_diff * paths[i].sup_state_diff;
        y_sq[i] = paths[i].sup_diff * paths[i].sup_diff;
        report.max_sup_reg_diff = std::max(report.max_sup_reg_diff, paths[i].sup_reg_diff);
    }
    const auto state = stats::summarize(state_sq);
    const auto y = stats::summarize(y_sq);
    report.eps = eps;
    report.t = t;
    report.n = n;
    report.mean_sup_sq = state.mean;
    report.mean_sup_sq_se = state.std_err;
    report.mean_sup_y_sq = y.mean;
    report.mean_sup_y_sq_se = y.std_err;
    report.bound = coupling_bound(t, eps);
    report.bound_y = std::exp(std::log(8.0) + std::log(t) + 32.0 * t + 2.0 * std::log(eps));
    report.pass = report.mean_sup_sq <= report.bound;
    return report;
}

}  // namespace qsearch
