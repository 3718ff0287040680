#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qsearch/model.hpp"

namespace qsearch {

struct SimGrid {
    double dt = 1e-3;
    double horizon = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    // ceil(horizon / dt); the last grid time steps() * dt may exceed horizon by < dt.
    std::size_t steps() const;
};

// Discretized trajectory. `regulator` is the cumulative push A_t (reflection or
// impulses); `impulses` lists grid indices at which an impulse/switch fired.
struct PathSample {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> regulator;
    std::vector<std::size_t> impulses;

    std::size_t size() const { return values.size(); }
};

// Y is the Skorokhod pre-image of the reflected process (pi^r = Y + A(Y)) and
// Y^eps the pre-image of the eps-impulse process (pi^eps = Y^eps + A^eps(Y^eps)),
// both driven by the same Brownian increments.
struct CoupledSample {
    PathSample y;
    PathSample y_eps;
    double sup_diff = 0.0;        // max_s |Y_s - Y^eps_s|
    double sup_reg_diff = 0.0;    // max_s |A_s(Y^eps) - A^eps_s(Y^eps)|
    double sup_state_diff = 0.0;  // max_s |pi^r_s - pi^eps_s|
};

namespace detail {

// Diffusion coefficient x(1-x), zero outside [0, 1].
inline double sigma(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return x * (1.0 - x);
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// One Euler step of dX = dW + (pi - 1/2) dt in logit coordinates.
inline double logit_step(double log_odds, double dw, double dt) {
    return log_odds + dw + (logistic(log_odds) - 0.5) * dt;
}

// One Euler step of dpi = pi(1-pi) dW in probability coordinates.
inline double euler_step(double x, double dw) { return x + sigma(x) * dw; }

// A^eps = eps * floor(a / eps), corrected so that 0 <= a - A^eps < eps holds
// in floating point as well.
inline double floor_to_multiple(double a, double eps) {
    double k = std::floor(a / eps);
    while (a - k * eps >= eps) k += 1.0;
    while (k > 0.0 && a - k * eps < 0.0) k -= 1.0;
    return k * eps;
}

}  // namespace detail

// Unreflected posterior started at x0, integrated in logit coordinates.
// Uses the stream (grid.seed, path_index).
PathSample simulate_unreflected(const ModelParams& params, const SimGrid& grid, double x0,
                                std::uint64_t path_index = 0);
// Same scheme driven by explicit Brownian increments dw[i] (already scaled by sqrt(dt)).
PathSample simulate_unreflected_driven(const ModelParams& params, double dt, double x0,
                                       std::span<const double> dw);

// Reflected-at-pi_hat posterior by projection, started at pi_hat.
PathSample simulate_reflected(const ModelParams& params, const SimGrid& grid,
                              std::uint64_t path_index = 0);
PathSample simulate_reflected_driven(const ModelParams& params, double dt,
                                     std::span<const double> dw);

// eps-impulse posterior: resets to pi_hat whenever a grid value is <= pi_hat - eps.
PathSample simulate_impulse(const ModelParams& params, double eps, const SimGrid& grid,
                            std::uint64_t path_index = 0);
PathSample simulate_impulse_driven(const ModelParams& params, double eps, double dt,
                                   std::span<const double> dw);

CoupledSample simulate_coupled(const ModelParams& params, double eps, const SimGrid& grid,
                               std::uint64_t path_index = 0);
CoupledSample simulate_coupled_driven(const ModelParams& params, double eps, double dt,
                                      std::span<const double> dw);

// Brownian increments sqrt(dt) * Z for the stream (seed, path_index).
std::vector<double> brownian_increments(const SimGrid& grid, std::uint64_t path_index = 0);

// Smallest grid time whose value is >= level.
std::optional<double> first_hit(const PathSample& path, double level);

}  // namespace qsearch
