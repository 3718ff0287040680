#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsearch::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2 };

// Bad flag values; maps to kUsageError.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Process environment lookup.
EnvLookup process_env();

struct TableSpec {
    int id = 0;
    std::string fixed_name;  // "pi_hat" or "c"
    double fixed_value = 0.0;
    std::string sweep_name;
    std::vector<double> sweep;
};

// Grids of the four published threshold tables. Throws UsageError for id outside 1..4.
TableSpec table_spec(int id);

// args[0] is the program name. Output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env());

}  // namespace qsearch::cli
