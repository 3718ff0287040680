#pragma once

// Closed-form solution of the free-boundary problem
//
//   1/2 [x(1-x)]^2 f''(x) = -c          on (pi_hat, pi_star)
//   f(x) = 1 - x                         on [pi_star, 1]
//   f'(pi_hat) = 0,  f'(pi_star) = -1
//
// whose general solution on the continuation region is
// Psi(x) + A x + B with Psi(x) = 2c (1-2x) log(x/(1-x)).

namespace qsearch {

struct ModelParams {
    double c = 0.0;      // observation cost per unit time
    double prior = 0.0;  // pi_hat = P(theta = 1) for a fresh channel

    // Throws std::invalid_argument unless c > 0 and 0 < prior < 1.
    static ModelParams make(double c, double prior);
    void validate() const;
};

struct ThresholdSolution {
    ModelParams params;
    double pi_star = 0.0;
    double a_bar = 0.0;
    double b_bar = 0.0;
    double tol = 0.0;
    // Set when pi_star - pi_hat < 1e-6; the stopping region then swallows
    // nearly the whole state space.
    bool near_degenerate = false;
};

inline constexpr double kDefaultSolverTol = 1e-12;

// log(x / (1 - x)) evaluated as log(x) - log1p(-x).
double logit(double x);

double psi(double x, double c);
double psi_prime(double x, double c);
double psi_second(double x, double c);

// A_bar = -Psi'(pi_hat), via the expanded closed form.
double a_bar(const ModelParams& params);

// Bisection for the unique root of Psi'(x) + A_bar + 1 on (pi_hat, 1).
ThresholdSolution solve_threshold(const ModelParams& params, double tol = kDefaultSolverTol);

// Candidate value function on [pi_hat, 1].
double value(const ThresholdSolution& sol, double x);
double value_derivative(const ThresholdSolution& sol, double x);
double value_second_derivative(const ThresholdSolution& sol, double x);

// 1/2 x^2 (1-x)^2 f''(x) + c on the continuation region (pi_hat, pi_star).
double ode_residual(const ThresholdSolution& sol, double x);

}  // namespace qsearch
