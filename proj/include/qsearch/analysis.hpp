#pragma once

#include <cstddef>

#include "qsearch/kernels.hpp"
#include "qsearch/model.hpp"
#include "qsearch/sde.hpp"

namespace qsearch {

struct RiskEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::size_t n = 0;
    double dt = 0.0;
};

/// M(y) = integral of 2 / (z^2 (1-z)^2) over [pi_hat, y], in closed form.
///
/// This is the scale-adjusted speed-measure mass of the reflected posterior
/// diffusion; its antiderivative follows from
/// 1/(z^2 (1-z)^2) = 1/z^2 + 1/(1-z)^2 + 2/z + 2/(1-z).
double speed_measure_mass(double pi_hat, double y);

/// E_x[inf{t : pi^r_t = b}] for the driftless posterior reflected at pi_hat,
/// i.e. the integral of M(y) over [x, b], by adaptive Gauss-Kronrod
/// quadrature to relative error 1e-10.
///
/// Requires 0 < pi_hat <= x <= b < 1; throws std::domain_error otherwise.
double expected_hitting_time(double pi_hat, double x, double b);

/// Output of the eps-optimal planning procedure.
///
/// `t_bound` makes P(tau > t_bound) < eps_target / 4 by Markov's inequality
/// and `eps2` satisfies 16 t e^{32 t} eps2^2 + eps2 < eps_target / 2. The
/// e^{32 t} factor makes eps2 underflow for modest t, in which case
/// `feasible` is false and eps2 is 0.
struct EpsilonPlan {
    double eps_target = 0.0;
    double pi_star = 0.0;
    double expected_tau = 0.0;
    double t_bound = 0.0;
    double eps2 = 0.0;
    double log_coupling_coeff = 0.0;  // log(16 t e^{32 t})
    bool feasible = false;
};

inline constexpr double kPlanShrink = 0.99;

/// 16 t e^{32 t} eps^2 + eps, evaluated in log space so that tiny eps with
/// large t does not produce inf * 0.
double coupling_bound(double t, double eps);

EpsilonPlan plan_epsilon_optimal(const ModelParams& params, double eps_target);

/// Bayes risk c tau + (1 - pi^r_tau) of stopping the reflected diffusion at
/// the first grid time it reaches `threshold`. Paths run until they hit, so
/// nothing is truncated. Requires n >= 100.
RiskEstimate estimate_risk_at_threshold(const ModelParams& params, double threshold, const SimGrid& grid,
                                        std::size_t n, kernels::Exec exec = kernels::Exec::parallel);

RiskEstimate estimate_risk_reflected(const ModelParams& params, const ThresholdSolution& sol,
                                     const SimGrid& grid, std::size_t n,
                                     kernels::Exec exec = kernels::Exec::parallel);

struct CouplingReport {
    double eps = 0.0;
    double t = 0.0;
    std::size_t n = 0;
    double mean_sup_sq = 0.0;     // E[(pi^eps - pi^r)^{*2}_t]
    double mean_sup_sq_se = 0.0;
    double mean_sup_y_sq = 0.0;   // E[(Y - Y^eps)^{*2}_t]
    double mean_sup_y_sq_se = 0.0;
    double max_sup_reg_diff = 0.0;
    double bound = 0.0;           // 16 t e^{32 t} eps^2 + eps
    double bound_y = 0.0;         // 8 t e^{32 t} eps^2
    bool pass = false;
};

/// Monte Carlo check of the L2 sup-distance bound between the eps-impulse and
/// reflected processes at time t, from n coupled paths on grid.dt.
CouplingReport verify_coupling_bound(const ModelParams& params, double eps, double t, const SimGrid& grid,
                                     std::size_t n, kernels::Exec exec = kernels::Exec::parallel);

}  // namespace qsearch
