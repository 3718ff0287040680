#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "qsearch/analysis.hpp"
#include "qsearch/stats.hpp"

using namespace qsearch;

namespace {

struct HitCase {
    double pi_hat, x, b, expected;
};

// Reference values from 30-digit quadrature.
constexpr HitCase kHitCases[] = {
    {0.5, 0.5, 0.922, 4.1690838379115009},   {0.75, 0.75, 0.941, 1.9286129033017067},
    {0.2, 0.2, 0.867, 9.7896248198082995},   {0.5, 0.5, 0.7, 0.67783828830976257},
    {0.3, 0.3, 0.898, 7.0899074618202094},   {0.5, 0.6, 0.9, 3.3533732804946859},
    {0.05, 0.1, 0.5, 16.353437779770458},
};

double bayes_risk_at(const ModelParams& p, double b) {
    return p.c * expected_hitting_time(p.prior, p.prior, b) + 1.0 - b;
}

}  // namespace

TEST(SpeedMeasure, ReferenceValuesAndQuadrature) {
    EXPECT_NEAR(speed_measure_mass(0.5, 0.9), 26.566676087122661, 1e-12);
    EXPECT_NEAR(speed_measure_mass(0.2, 0.6), 16.333704543578885, 1e-12);
    EXPECT_NEAR(speed_measure_mass(0.05, 0.99), 266.03277013910718, 1e-10);
    EXPECT_EQ(speed_measure_mass(0.3, 0.3), 0.0);
    auto density = [](double z) { return 2.0 / (z * z * (1 - z) * (1 - z)); };
    for (double lo : {0.05, 0.2, 0.5, 0.8}) {
        for (double hi : {lo + 0.01, lo + 0.1, 0.99}) {
            const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, lo, hi, 20, 1e-13);
            EXPECT_NEAR(speed_measure_mass(lo, hi), q, 1e-10 * q);
        }
    }
    EXPECT_THROW(speed_measure_mass(0.5, 0.4), std::domain_error);
    EXPECT_THROW(speed_measure_mass(0.5, 1.0), std::domain_error);
}

TEST(ExpectedHittingTime, ReferenceValues) {
    for (const auto& h : kHitCases) {
        EXPECT_NEAR(expected_hitting_time(h.pi_hat, h.x, h.b), h.expected, 1e-9 * h.expected)
            << h.pi_hat << " " << h.x << " " << h.b;
    }
}

TEST(ExpectedHittingTime, ClosedFormThroughValueFunction) {
    // f(x) = c E_x[tau] + 1 - pi* on the continuation region.
    for (double c : {0.01, 0.03, 0.1}) {
        for (double p : {0.2, 0.5, 0.75}) {
            const auto sol = solve_threshold(ModelParams::make(c, p));
            for (double x : {p, 0.5 * (p + sol.pi_star)}) {
                const double et = expected_hitting_time(p, x, sol.pi_star);
                EXPECT_NEAR(c * et + 1.0 - sol.pi_star, value(sol, x), 1e-9);
                const double closed = (psi(x, c) - psi(sol.pi_star, c) + sol.a_bar * (x - sol.pi_star)) / c;
                EXPECT_NEAR(et, closed, 1e-9 * std::max(1.0, closed));
            }
        }
    }
}

TEST(ExpectedHittingTime, EdgesAndMonotonicity) {
    EXPECT_EQ(expected_hitting_time(0.5, 0.7, 0.7), 0.0);
    double prev = 0.0;
    for (double b = 0.55; b < 0.99; b += 0.05) {
        const double e = expected_hitting_time(0.5, 0.5, b);
        EXPECT_GT(e, prev);
        prev = e;
    }
    EXPECT_THROW(expected_hitting_time(0.5, 0.4, 0.7), std::domain_error);
    EXPECT_THROW(expected_hitting_time(0.5, 0.8, 0.7), std::domain_error);
    EXPECT_THROW(expected_hitting_time(0.5, 0.5, 1.0), std::domain_error);
}

TEST(ExpectedHittingTime, MatchesMonteCarlo) {
    const auto params = ModelParams::make(0.03, 0.5);
    const SimGrid grid{1e-4, 1.0, 31};
    const auto stops = kernels::reflected_stops(params, 0.7, grid, 2000);
    std::vector<double> taus;
    for (const auto& s : stops) taus.push_back(s.tau);
    const auto s = stats::summarize(taus);
    EXPECT_NEAR(s.mean, 0.67783828830976257, 3.0 * s.std_err + 5.0 * std::sqrt(grid.dt));
}

TEST(CouplingBound, Values) {
    EXPECT_NEAR(coupling_bound(1.0, 0.01), 16.0 * std::exp(32.0) * 1e-4 + 0.01, 1e-6 * coupling_bound(1.0, 0.01));
    EXPECT_EQ(coupling_bound(1000.0, 0.0), 0.0);
    EXPECT_NEAR(coupling_bound(20.0, 1e-300), 1e-300, 1e-310);  // e^{640} eps^2 stays finite
    EXPECT_THROW(coupling_bound(0.0, 0.1), std::domain_error);
}

TEST(Plan, ReferenceCase) {
    const auto plan = plan_epsilon_optimal(ModelParams::make(0.1, 0.5), 0.5);
    EXPECT_NEAR(plan.pi_star, 0.75472440812323073, 1e-10);
    EXPECT_NEAR(plan.expected_tau, 1.1452105931930156, 1e-9);
    EXPECT_NEAR(plan.t_bound, 9.1616847455441259, 1e-8);
    ASSERT_TRUE(plan.feasible);
    EXPECT_NEAR(plan.eps2, kPlanShrink * 8.9953126431965885e-66, 0.01 * 8.9953126431965885e-66);
}

TEST(Plan, Invariants) {
    for (double c : {0.05, 0.1, 0.2}) {
        for (double p : {0.3, 0.5, 0.8}) {
            const auto params = ModelParams::make(c, p);
            double prev_eps2 = 1.0;
            for (double eps : {0.8, 0.5, 0.25}) {
                const auto plan = plan_epsilon_optimal(params, eps);
                EXPECT_NEAR(plan.t_bound, 4.0 * plan.expected_tau / eps, 1e-12 * plan.t_bound);
                if (!plan.feasible) {
                    EXPECT_EQ(plan.eps2, 0.0);
                    continue;
                }
                EXPECT_GT(plan.eps2, 0.0);
                EXPECT_LT(plan.eps2, p);
                EXPECT_LT(coupling_bound(plan.t_bound, plan.eps2), eps / 2.0);
                EXPECT_LT(plan.eps2, prev_eps2);
                prev_eps2 = plan.eps2;
            }
        }
    }
}

TEST(Plan, SmallTargetIsInfeasible) {
    const auto plan = plan_epsilon_optimal(ModelParams::make(0.1, 0.5), 0.01);
    EXPECT_FALSE(plan.feasible);
    EXPECT_EQ(plan.eps2, 0.0);
    EXPECT_GT(plan.t_bound, 400.0);
    EXPECT_THROW(plan_epsilon_optimal(ModelParams::make(0.1, 0.5), 0.0), std::invalid_argument);
}

TEST(Risk, ReflectedMatchesValueFunction) {
    const auto params = ModelParams::make(0.1, 0.5);
    const auto sol = solve_threshold(params);
    const auto est = estimate_risk_reflected(params, sol, SimGrid{1e-4, 1.0, 2}, 2000);
    const double f = value(sol, params.prior);
    EXPECT_NEAR(est.mean, f, std::max(4.0 * est.std_err, 0.02 * f));
    EXPECT_EQ(est.n, 2000u);
    EXPECT_THROW(estimate_risk_reflected(params, sol, SimGrid{1e-4, 1.0, 2}, 50), std::invalid_argument);
}

TEST(Risk, OptimalThresholdMinimizesRisk) {
    for (double c : {0.01, 0.1}) {
        for (double p : {0.3, 0.5}) {
            const auto params = ModelParams::make(c, p);
            const auto sol = solve_threshold(params);
            const double best = bayes_risk_at(params, sol.pi_star);
            EXPECT_NEAR(best, value(sol, p), 1e-9);
            for (double d : {-0.1, -0.02, 0.01, 0.02}) {
                const double b = sol.pi_star + d;
                if (b <= p || b >= 1.0) continue;
                EXPECT_GT(bayes_risk_at(params, b), best);
            }
        }
    }
}

TEST(Risk, StandardErrorShrinksLikeRootN) {
    const auto params = ModelParams::make(0.1, 0.5);
    const SimGrid grid{1e-3, 1.0, 4};
    const auto small = estimate_risk_at_threshold(params, 0.75, grid, 400);
    const auto large = estimate_risk_at_threshold(params, 0.75, grid, 1600);
    EXPECT_NEAR(small.std_err / large.std_err, 2.0, 0.4);
}

TEST(Coupling, ReportWithinBounds) {
    const auto params = ModelParams::make(0.03, 0.5);
    const SimGrid grid{1e-3, 0.25, 6};
    double prev = 1.0;
    for (double eps : {0.04, 0.02, 0.01}) {
        const auto r = verify_coupling_bound(params, eps, 0.25, grid, 500);
        EXPECT_TRUE(r.pass);
        EXPECT_LE(r.mean_sup_y_sq, r.bound_y);
        EXPECT_LE(r.max_sup_reg_diff, eps);
        EXPECT_LT(r.mean_sup_y_sq, prev);
        prev = r.mean_sup_y_sq;
    }
    EXPECT_THROW(verify_coupling_bound(params, 0.02, 0.5, grid, 100), std::invalid_argument);
}
