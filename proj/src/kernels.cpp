#include "qsearch/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qsearch/rng.hpp"

namespace qsearch::kernels {

namespace {

double terminal_unreflected(const SimGrid& grid, double x0, std::uint64_t index) {
    NormalStream normal(grid.seed, index);
    const double sqrt_dt = std::sqrt(grid.dt);
    const std::size_t steps = grid.steps();
    double z = logit(x0);
    for (std::size_t i = 0; i < steps; ++i) z = detail::logit_step(z, sqrt_dt * normal(), grid.dt);
    if (steps == 0) return x0;
    return std::clamp(detail::logistic(z), std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double terminal_reflected(const ModelParams& params, const SimGrid& grid, std::uint64_t index) {
    NormalStream normal(grid.seed, index);
    const double sqrt_dt = std::sqrt(grid.dt);
    const std::size_t steps = grid.steps();
    double x = params.prior;
    for (std::size_t i = 0; i < steps; ++i) {
        x = std::max(params.prior, detail::euler_step(x, sqrt_dt * normal()));
    }
    return x;
}

double terminal_impulse(const ModelParams& params, double eps, const SimGrid& grid, std::uint64_t index) {
    NormalStream normal(grid.seed, index);
    const double sqrt_dt = std::sqrt(grid.dt);
    const std::size_t steps = grid.steps();
    const double trigger = params.prior - eps;
    double x = params.prior;
    for (std::size_t i = 0; i < steps; ++i) {
        x = detail::euler_step(x, sqrt_dt * normal());
        if (x <= trigger) x = params.prior;
    }
    return x;
}

}  // namespace

std::vector<double> terminal_values(const ModelParams& params, const TerminalSpec& spec,
                                    const SimGrid& grid, std::size_t n, Exec exec) {
    params.validate();
    grid.validate();
    switch (spec.kind) {
        case PathKind::unreflected:
            if (!(spec.x0 > 0.0 && spec.x0 < 1.0)) {
                throw std::invalid_argument("start x0 must lie in (0, 1), got " + std::to_string(spec.x0));
            }
            return map_paths<double>(n, exec, [&](std::size_t i) { return terminal_unreflected(grid, spec.x0, i); });
        case PathKind::reflected:
            return map_paths<double>(n, exec, [&](std::size_t i) { return terminal_reflected(params, grid, i); });
        case PathKind::impulse:
            if (!(spec.eps > 0.0 && spec.eps < params.prior)) {
                throw std::invalid_argument("impulse offset eps must lie in (0, pi_hat), got " +
                                            std::to_string(spec.eps));
            }
            return map_paths<double>(n, exec,
                                     [&](std::size_t i) { return terminal_impulse(params, spec.eps, grid, i); });
    }
    throw std::logic_error("terminal_values: unknown path kind");
}

std::vector<StopRecord> reflected_stops(const ModelParams& params, double level, const SimGrid& grid,
                                        std::size_t n, Exec exec, std::uint64_t max_steps) {
    params.validate();
    if (!(grid.dt > 0.0)) throw std::invalid_argument("time step dt must be > 0");
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("stopping level must lie in (0, 1), got " + std::to_string(level));
    }
    const double sqrt_dt = std::sqrt(grid.dt);
    const double floor = params.prior;
    return map_paths<StopRecord>(n, exec, [&](std::size_t index) {
        NormalStream normal(grid.seed, index);
        double x = floor;
        double pushed = 0.0;
        std::uint64_t step = 0;
        while (x < level) {
            if (++step > max_steps) {
                throw std::runtime_error("reflected_stops: no hit of level within max_steps");
            }
            const double pre = detail::euler_step(x, sqrt_dt * normal());
            if (pre < floor) {
                pushed += floor - pre;
                x = floor;
            } else {
                x = pre;
            }
        }
        return StopRecord{static_cast<double>(step) * grid.dt, x, pushed};
    });
}

std::vector<CouplingStats> coupled_stats(const ModelParams& params, double eps, const SimGrid& grid,
                                         std::size_t n, Exec exec) {
    params.validate();
    grid.validate();
    if (!(eps > 0.0 && eps < params.prior)) {
        throw std::invalid_argument("impulse offset eps must lie in (0, pi_hat), got " + std::to_string(eps));
    }
    const double p = params.prior;
    const double sqrt_dt = std::sqrt(grid.dt);
    const std::size_t steps = grid.steps();
    return map_paths<CouplingStats>(n, exec, [&](std::size_t index) {
        NormalStream normal(grid.seed, index);
        CouplingStats s;
        double y = p, reg = 0.0;
        double ye = p, sup_below = 0.0, reg_eps = 0.0;
        for (std::size_t i = 0; i < steps; ++i) {
            const double dw = sqrt_dt * normal();
            y += detail::sigma(y + reg) * dw;
            reg = std::max(reg, p - y);
            ye += detail::sigma(ye + reg_eps) * dw;
            sup_below = std::max(sup_below, p - ye);
            reg_eps = detail::floor_to_multiple(sup_below, eps);
            s.sup_diff = std::max(s.sup_diff, std::abs(y - ye));
            s.sup_reg_diff = std::max(s.sup_reg_diff, std::abs(sup_below - reg_eps));
            s.sup_state_diff = std::max(s.sup_state_diff, std::abs((y + reg) - (ye + reg_eps)));
        }
        return s;
    });
}

}  // namespace qsearch::kernels
