#include "qsearch/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qsearch/rng.hpp"

namespace qsearch {

namespace {

void require_dt(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("time step dt must be > 0, got " + std::to_string(dt));
    }
}

void require_eps(const ModelParams& params, double eps) {
    if (!(eps > 0.0 && eps < params.prior)) {
        throw std::invalid_argument("impulse offset eps must lie in (0, pi_hat), got " + std::to_string(eps));
    }
}

PathSample make_path(std::size_t steps) {
    PathSample path;
    path.times.reserve(steps + 1);
    path.values.reserve(steps + 1);
    path.regulator.reserve(steps + 1);
    return path;
}

void push(PathSample& path, double t, double value, double regulator) {
    path.times.push_back(t);
    path.values.push_back(value);
    path.regulator.push_back(regulator);
}

}  // namespace

void SimGrid::validate() const {
    require_dt(dt);
    if (!(horizon >= dt) || !std::isfinite(horizon)) {
        throw std::invalid_argument("horizon must be finite and >= dt, got " + std::to_string(horizon));
    }
    if (horizon / dt > 1e12) {
        throw std::invalid_argument("horizon / dt exceeds 1e12 steps");
    }
}

std::size_t SimGrid::steps() const {
    validate();
    // Guard against horizon/dt landing a hair above an integer.
    const double ratio = horizon / dt;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * nearest) return static_cast<std::size_t>(nearest);
    return static_cast<std::size_t>(std::ceil(ratio));
}

std::vector<double> brownian_increments(const SimGrid& grid, std::uint64_t path_index) {
    const std::size_t n = grid.steps();
    const double sqrt_dt = std::sqrt(grid.dt);
    NormalStream normal(grid.seed, path_index);
    std::vector<double> dw(n);
    for (auto& w : dw) w = sqrt_dt * normal();
    return dw;
}

PathSample simulate_unreflected_driven(const ModelParams& params, double dt, double x0,
                                       std::span<const double> dw) {
    params.validate();
    require_dt(dt);
    if (!(x0 > 0.0 && x0 < 1.0)) {
        throw std::invalid_argument("start x0 must lie in (0, 1), got " + std::to_string(x0));
    }
    PathSample path = make_path(dw.size());
    double z = logit(x0);
    push(path, 0.0, x0, 0.0);
    for (std::size_t i = 0; i < dw.size(); ++i) {
        z = detail::logit_step(z, dw[i], dt);
        // logistic() saturates to exactly 0 or 1 only for |z| > ~37, which
        // would need an absurd excursion; clamp keeps the open-interval contract.
        const double x = std::clamp(detail::logistic(z), std::numeric_limits<double>::min(),
                                    std::nextafter(1.0, 0.0));
        push(path, static_cast<double>(i + 1) * dt, x, 0.0);
    }
    return path;
}

PathSample simulate_unreflected(const ModelParams& params, const SimGrid& grid, double x0,
                                std::uint64_t path_index) {
    const auto dw = brownian_increments(grid, path_index);
    return simulate_unreflected_driven(params, grid.dt, x0, dw);
}

PathSample simulate_reflected_driven(const ModelParams& params, double dt, std::span<const double> dw) {
    params.validate();
    require_dt(dt);
    const double floor = params.prior;
    PathSample path = make_path(dw.size());
    double x = floor;
    double pushed = 0.0;
    push(path, 0.0, x, pushed);
    for (std::size_t i = 0; i < dw.size(); ++i) {
        const double pre = detail::euler_step(x, dw[i]);
        if (pre < floor) {
            pushed += floor - pre;
            x = floor;
        } else {
            x = pre;
        }
        push(path, static_cast<double>(i + 1) * dt, x, pushed);
    }
    return path;
}

PathSample simulate_reflected(const ModelParams& params, const SimGrid& grid, std::uint64_t path_index) {
    const auto dw = brownian_increments(grid, path_index);
    return simulate_reflected_driven(params, grid.dt, dw);
}

PathSample simulate_impulse_driven(const ModelParams& params, double eps, double dt,
                                   std::span<const double> dw) {
    params.validate();
    require_dt(dt);
    require_eps(params, eps);
    const double reset = params.prior;
    const double trigger = params.prior - eps;
    PathSample path = make_path(dw.size());
    double x = reset;
    std::size_t count = 0;
    push(path, 0.0, x, 0.0);
    for (std::size_t i = 0; i < dw.size(); ++i) {
        x = detail::euler_step(x, dw[i]);
        if (x <= trigger) {
            x = reset;
            ++count;
            path.impulses.push_back(i + 1);
        }
        push(path, static_cast<double>(i + 1) * dt, x, static_cast<double>(count) * eps);
    }
    return path;
}

PathSample simulate_impulse(const ModelParams& params, double eps, const SimGrid& grid,
                            std::uint64_t path_index) {
    require_eps(params, eps);
    const auto dw = brownian_increments(grid, path_index);
    return simulate_impulse_driven(params, eps, grid.dt, dw);
}

CoupledSample simulate_coupled_driven(const ModelParams& params, double eps, double dt,
                                      std::span<const double> dw) {
    params.validate();
    require_dt(dt);
    require_eps(params, eps);
    const double p = params.prior;

    CoupledSample out;
    out.y = make_path(dw.size());
    out.y_eps = make_path(dw.size());

    double y = p, reg = 0.0;
    double ye = p, sup_below = 0.0, reg_eps = 0.0;
    push(out.y, 0.0, y, reg);
    push(out.y_eps, 0.0, ye, reg_eps);

    for (std::size_t i = 0; i < dw.size(); ++i) {
        y += detail::sigma(y + reg) * dw[i];
        reg = std::max(reg, p - y);

        ye += detail::sigma(ye + reg_eps) * dw[i];
        sup_below = std::max(sup_below, p - ye);
        const double next_reg_eps = detail::floor_to_multiple(sup_below, eps);
        if (next_reg_eps > reg_eps) out.y_eps.impulses.push_back(i + 1);
        reg_eps = next_reg_eps;

        const double t = static_cast<double>(i + 1) * dt;
        push(out.y, t, y, reg);
        push(out.y_eps, t, ye, reg_eps);

        out.sup_diff = std::max(out.sup_diff, std::abs(y - ye));
        out.sup_reg_diff = std::max(out.sup_reg_diff, std::abs(sup_below - reg_eps));
        out.sup_state_diff = std::max(out.sup_state_diff, std::abs((y + reg) - (ye + reg_eps)));
    }
    return out;
}

CoupledSample simulate_coupled(const ModelParams& params, double eps, const SimGrid& grid,
                               std::uint64_t path_index) {
    require_eps(params, eps);
    const auto dw = brownian_increments(grid, path_index);
    return simulate_coupled_driven(params, eps, grid.dt, dw);
}

std::optional<double> first_hit(const PathSample& path, double level) {
    for (std::size_t i = 0; i < path.values.size(); ++i) {
        if (path.values[i] >= level) return path.times[i];
    }
    return std::nullopt;
}

}  // namespace qsearch
