#include "qsearch/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qsearch {

namespace {

void require_open_unit(double x, const char* what) {
    if (!(x > 0.0 && x < 1.0)) {
        throw std::domain_error(std::string(what) + " must lie in (0, 1), got " + std::to_string(x));
    }
}

void require_positive_cost(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::domain_error("cost rate c must be positive and finite, got " + std::to_string(c));
    }
}

void require_state(const ThresholdSolution& sol, double x) {
    if (!(x >= sol.params.prior && x <= 1.0)) {
        throw std::domain_error("x = " + std::to_string(x) + " outside [pi_hat, 1] = [" +
                                std::to_string(sol.params.prior) + ", 1]");
    }
}

}  // namespace

ModelParams ModelParams::make(double c, double prior) {
    ModelParams p{c, prior};
    p.validate();
    return p;
}

void ModelParams::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("observation cost c must be > 0, got " + std::to_string(c));
    }
    if (!(prior > 0.0 && prior < 1.0)) {
        throw std::invalid_argument("prior pi_hat must lie in (0, 1), got " + std::to_string(prior));
    }
}

double logit(double x) {
    require_open_unit(x, "x");
    return std::log(x) - std::log1p(-x);
}

double psi(double x, double c) {
    require_open_unit(x, "x");
    require_positive_cost(c);
    return 2.0 * c * (1.0 - 2.0 * x) * logit(x);
}

double psi_prime(double x, double c) {
    require_open_unit(x, "x");
    require_positive_cost(c);
    const double q = x * (1.0 - x);
    return 2.0 * c * ((1.0 - 2.0 * x) - 2.0 * q * logit(x)) / q;
}

double psi_second(double x, double c) {
    require_open_unit(x, "x");
    require_positive_cost(c);
    const double q = x * (1.0 - x);
    return -2.0 * c / (q * q);
}

double a_bar(const ModelParams& params) {
    params.validate();
    const double p = params.prior;
    const double log_odds = logit(p);
    return -2.0 * params.c * ((2.0 * p - 2.0 * (p - 1.0) * p * log_odds - 1.0) / ((p - 1.0) * p));
}

ThresholdSolution solve_threshold(const ModelParams& params, double tol) {
    params.validate();
    if (!(tol > 0.0 && tol < 1e-6)) {
        throw std::invalid_argument("solver tolerance must lie in (0, 1e-6), got " + std::to_string(tol));
    }

    const double c = params.c;
    const double slope = a_bar(params);
    auto g = [&](double x) { return psi_prime(x, c) + slope + 1.0; };

    double lo = params.prior;
    double hi = 1.0 - 1e-12;
    double g_lo = g(lo);
    double g_hi = g(hi);
    if (!(g_lo > 0.0 && g_hi < 0.0)) {
        throw std::runtime_error("solve_threshold: could not bracket the smooth-fit root on [pi_hat, 1 - 1e-12]");
    }

    constexpr int kMaxIter = 200;
    for (int it = 0; it < kMaxIter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval is down to adjacent doubles
        const double g_mid = g(mid);
        if (g_mid > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
        if (hi - lo <= tol && std::min(std::abs(g_lo), std::abs(g_hi)) <= tol) break;
    }

    const double root = std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
    const double residual = std::abs(g(root));
    if (residual > tol) {
        throw std::runtime_error("solve_threshold: smooth-fit residual " + std::to_string(residual) +
                                 " exceeds tolerance after bisection");
    }

    ThresholdSolution sol;
    sol.params = params;
    sol.pi_star = root;
    sol.a_bar = slope;
    sol.b_bar = 1.0 - root - psi(root, c) - slope * root;
    sol.tol = tol;
    sol.near_degenerate = root - params.prior < 1e-6;
    return sol;
}

double value(const ThresholdSolution& sol, double x) {
    require_state(sol, x);
    if (x >= sol.pi_star) return 1.0 - x;
    return psi(x, sol.params.c) + sol.a_bar * x + sol.b_bar;
}

double value_derivative(const ThresholdSolution& sol, double x) {
    require_state(sol, x);
    if (x >= sol.pi_star) return -1.0;
    return psi_prime(x, sol.params.c) + sol.a_bar;
}

double value_second_derivative(const ThresholdSolution& sol, double x) {
    require_state(sol, x);
    if (x >= sol.pi_star) return 0.0;
    return psi_second(x, sol.params.c);
}

double ode_residual(const ThresholdSolution& sol, double x) {
    if (!(x > sol.params.prior && x < sol.pi_star)) {
        throw std::domain_error("ode_residual: x = " + std::to_string(x) + " outside (pi_hat, pi_star)");
    }
    const double q = x * (1.0 - x);
    return 0.5 * q * q * psi_second(x, sol.params.c) + sol.params.c;
}

}  // namespace qsearch
