#pragma once

// Batch Monte Carlo kernels. Every kernel has a serial reference loop and an
// OpenMP loop over paths; each path draws from its own (seed, index) stream
// and writes its own slot, so both produce bit-identical output.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#include "qsearch/model.hpp"
#include "qsearch/sde.hpp"

namespace qsearch::kernels {

enum class Exec { serial, parallel };

// Runs fn(i) -> T for i in [0, n) and returns the results in index order.
template <class T, class Fn>
std::vector<T> map_paths(std::size_t n, Exec exec, Fn&& fn) {
    std::vector<T> out(n);
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    const auto count = static_cast<std::int64_t>(n);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(qsearch_map_paths_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

enum class PathKind { unreflected, reflected, impulse };

struct TerminalSpec {
    PathKind kind = PathKind::reflected;
    double x0 = 0.5;   // start of unreflected paths; others start at pi_hat
    double eps = 0.0;  // impulse offset, impulse paths only
};

// Value at the last grid time of each of n paths; path i matches
// simulate_*(params, grid, i).values.back() exactly.
std::vector<double> terminal_values(const ModelParams& params, const TerminalSpec& spec,
                                    const SimGrid& grid, std::size_t n, Exec exec = Exec::parallel);

struct StopRecord {
    double tau = 0.0;        // first grid time with value >= level
    double value = 0.0;      // posterior at tau
    double regulator = 0.0;  // reflection push accumulated up to tau
};

// Reflected paths started at pi_hat, run without a horizon until they reach
// `level` (grid.horizon is ignored; grid.dt and grid.seed are used). Path i
// matches first_hit(simulate_reflected(params, grid, i), level) whenever the
// stored path is long enough. Throws std::runtime_error past max_steps.
std::vector<StopRecord> reflected_stops(const ModelParams& params, double level, const SimGrid& grid,
                                        std::size_t n, Exec exec = Exec::parallel,
                                        std::uint64_t max_steps = 2'000'000'000ULL);

struct CouplingStats {
    double sup_diff = 0.0;
    double sup_reg_diff = 0.0;
    double sup_state_diff = 0.0;
};

// Running maxima of the coupled pair over [0, grid.horizon]; path i matches
// simulate_coupled(params, eps, grid, i).
std::vector<CouplingStats> coupled_stats(const ModelParams& params, double eps, const SimGrid& grid,
                                         std::size_t n, Exec exec = Exec::parallel);

}  // namespace qsearch::kernels
