#include "cli.hpp"

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "output.hpp"
#include "qsearch/analysis.hpp"
#include "qsearch/kernels.hpp"
#include "qsearch/model.hpp"
#include "qsearch/sde.hpp"
#include "qsearch/search.hpp"
#include "qsearch/stats.hpp"

namespace qsearch::cli {

namespace {

using Json = nlohmann::ordered_json;

struct ModelFlags {
    double c = 0.0;
    double pi_hat = 0.0;
};

struct Options {
    ModelFlags model;
    double tol = kDefaultSolverTol;
    std::string format;  // empty: command default
    int table_id = 0;
    std::string mode;
    double eps = 0.01;
    double dt = 1e-4;
    double horizon = 1.0;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_path;
    double eps_target = 0.1;
    double threshold = 0.0;
    bool threshold_given = false;
};

ModelParams model_from(const ModelFlags& f) {
    if (!(f.c > 0.0) || !std::isfinite(f.c)) {
        throw UsageError("--c must be a positive number, got " + format_sig(f.c));
    }
    if (!(f.pi_hat > 0.0 && f.pi_hat < 1.0)) {
        throw UsageError("--pi-hat must lie in (0, 1), got " + format_sig(f.pi_hat));
    }
    return ModelParams::make(f.c, f.pi_hat);
}

std::string resolve_format(const std::string& format, const char* fallback) {
    if (format.empty()) return fallback;
    if (format != "json" && format != "csv") throw UsageError("--format must be csv or json, got " + format);
    return format;
}

void emit_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

double num(double v) { return rounded_sig(v); }

std::uint64_t resolve_seed(const Options& o, const EnvLookup& env) {
    if (o.seed_given) return o.seed;
    if (auto s = env("SEED")) {
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(s->c_str(), &end, 10);
        if (s->empty() || *end != '\0' || errno != 0 || s->front() == '-') {
            throw UsageError("SEED environment variable must be a non-negative integer, got '" + *s + "'");
        }
        return v;
    }
    return 0;
}

SimGrid grid_from(const Options& o, std::uint64_t seed) {
    if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw UsageError("--dt must be > 0, got " + format_sig(o.dt));
    if (!(o.horizon >= o.dt) || !std::isfinite(o.horizon)) {
        throw UsageError("--horizon must be >= --dt, got " + format_sig(o.horizon));
    }
    if (o.n < 2) throw UsageError("--n must be at least 2");
    return SimGrid{o.dt, o.horizon, seed};
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
    return f;
}

void write_path_csv(const std::string& path, const PathSample& sample) {
    auto f = open_output(path);
    f << "t,value,regulator,event_flag\n";
    std::size_t next_event = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const bool event = next_event < sample.impulses.size() && sample.impulses[next_event] == i;
        if (event) ++next_event;
        f << format_sig(sample.times[i], 9) << ',' << format_sig(sample.values[i], 9) << ','
          << format_sig(sample.regulator[i], 9) << ',' << (event ? 1 : 0) << '\n';
    }
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------

int cmd_threshold(const Options& o, std::ostream& out, std::ostream& err) {
    const ModelParams params = model_from(o.model);
    const std::string format = resolve_format(o.format, "json");
    if (!(o.tol > 0.0 && o.tol < 1e-6)) throw UsageError("--tol must lie in (0, 1e-6), got " + format_sig(o.tol));
    const ThresholdSolution sol = solve_threshold(params, o.tol);
    if (sol.near_degenerate) err << "warning: pi_star is within 1e-6 of pi_hat\n";

    if (format == "csv") {
        out << render_csv({{"c", "pi_hat", "pi_star", "a_bar", "b_bar", "tol"},
                           {format_sig(params.c), format_sig(params.prior), format_sig(sol.pi_star),
                            format_sig(sol.a_bar), format_sig(sol.b_bar), format_sig(sol.tol)}});
        return kSuccess;
    }
    Json j;
    j["schema"] = 1;
    j["command"] = "threshold";
    j["c"] = num(params.c);
    j["pi_hat"] = num(params.prior);
    j["pi_star"] = num(sol.pi_star);
    j["a_bar"] = num(sol.a_bar);
    j["b_bar"] = num(sol.b_bar);
    j["tol"] = num(sol.tol);
    j["near_degenerate"] = sol.near_degenerate;
    emit_json(out, j);
    return kSuccess;
}

int cmd_table(const Options& o, std::ostream& out) {
    const TableSpec spec = table_spec(o.table_id);
    const std::string format = resolve_format(o.format, "csv");

    std::vector<double> thresholds;
    for (double v : spec.sweep) {
        const double c = spec.sweep_name == "c" ? v : spec.fixed_value;
        const double prior = spec.sweep_name == "c" ? spec.fixed_value : v;
        thresholds.push_back(solve_threshold(ModelParams::make(c, prior)).pi_star);
    }

    if (format == "csv") {
        std::vector<CsvRow> rows{{spec.sweep_name, "pi_star"}};
        for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
            rows.push_back({format_sig(spec.sweep[i]), format_fixed(thresholds[i])});
        }
        out << render_csv(rows);
        return kSuccess;
    }
    Json j;
    j["schema"] = 1;
    j["command"] = "table";
    j["id"] = spec.id;
    j["fixed"] = Json{{spec.fixed_name, num(spec.fixed_value)}};
    Json rows = Json::array();
    for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
        rows.push_back(Json{{spec.sweep_name, num(spec.sweep[i])}, {"pi_star", rounded_fixed(thresholds[i])}});
    }
    j["rows"] = rows;
    emit_json(out, j);
    return kSuccess;
}

Json terminal_summary(const std::vector<double>& terminal) {
    const auto s = stats::summarize(terminal);
    Json j;
    j["terminal_mean"] = num(s.mean);
    j["terminal_se"] = num(s.std_err);
    j["terminal_variance"] = num(s.variance);
    return j;
}

int cmd_simulate(const Options& o, std::ostream& out, const EnvLookup& env) {
    const ModelParams params = model_from(o.model);
    const std::uint64_t seed = resolve_seed(o, env);
    const SimGrid grid = grid_from(o, seed);
    const bool needs_eps = o.mode == "impulse" || o.mode == "coupled" || o.mode == "search";
    if (needs_eps && !(o.eps > 0.0 && o.eps < params.prior)) {
        throw UsageError("--eps must lie in (0, pi_hat), got " + format_sig(o.eps));
    }

    Json j;
    j["schema"] = 1;
    j["command"] = "simulate";
    j["mode"] = o.mode;
    j["c"] = num(params.c);
    j["pi_hat"] = num(params.prior);
    if (needs_eps) j["eps"] = num(o.eps);
    j["dt"] = num(o.dt);
    if (o.mode != "search") j["horizon"] = num(o.horizon);
    j["n"] = o.n;
    j["seed"] = seed;

    if (o.mode == "plain" || o.mode == "reflected" || o.mode == "impulse") {
        kernels::TerminalSpec spec;
        spec.kind = o.mode == "plain"       ? kernels::PathKind::unreflected
                    : o.mode == "reflected" ? kernels::PathKind::reflected
                                            : kernels::PathKind::impulse;
        spec.x0 = params.prior;
        spec.eps = o.eps;
        j.update(terminal_summary(kernels::terminal_values(params, spec, grid, o.n)));
        if (!o.out_path.empty()) {
            const PathSample path = o.mode == "plain"       ? simulate_unreflected(params, grid, params.prior)
                                    : o.mode == "reflected" ? simulate_reflected(params, grid)
                                                            : simulate_impulse(params, o.eps, grid);
            write_path_csv(o.out_path, path);
        }
    } else if (o.mode == "coupled") {
        const CouplingReport r = verify_coupling_bound(params, o.eps, o.horizon, grid, o.n);
        j["mean_sup_state_diff_sq"] = num(r.mean_sup_sq);
        j["mean_sup_state_diff_sq_se"] = num(r.mean_sup_sq_se);
        j["mean_sup_diff_sq"] = num(r.mean_sup_y_sq);
        j["mean_sup_diff_sq_se"] = num(r.mean_sup_y_sq_se);
        j["sup_reg_diff_max"] = num(r.max_sup_reg_diff);
        j["bound"] = num(r.bound);
        j["bound_pass"] = r.pass;
        if (!o.out_path.empty()) write_path_csv(o.out_path, simulate_coupled(params, o.eps, grid).y_eps);
    } else if (o.mode == "search") {
        const ThresholdSolution sol = solve_threshold(params);
        const StrategyConfig cfg = make_strategy(params, sol, o.eps, o.dt);
        if (o.n < 100) throw UsageError("--n must be at least 100 for mode=search");
        const auto outcomes = search_trials(params, cfg, o.n, seed);
        const SearchRiskEstimate est = summarize_search(cfg, outcomes);
        j["pi_star"] = num(sol.pi_star);
        j["value_at_prior"] = num(value(sol, params.prior));
        j["mean_cost"] = num(est.risk.mean);
        j["mean_cost_se"] = num(est.risk.std_err);
        j["p_error"] = num(est.p_error);
        j["p_error_se"] = num(est.p_error_se);
        j["mean_tau"] = num(est.mean_tau);
        j["mean_tau_se"] = num(est.mean_tau_se);
        j["mean_switches"] = num(est.mean_switches);
        j["truncated"] = est.truncated;
        if (!o.out_path.empty()) {
            auto f = open_output(o.out_path);
            f << "trial,tau,switches,chosen_theta,cost,truncated\n";
            for (std::size_t i = 0; i < outcomes.size(); ++i) {
                const auto& t = outcomes[i];
                f << i << ',' << format_sig(t.tau, 9) << ',' << t.switches << ',' << t.chosen_theta << ','
                  << format_sig(t.cost, 9) << ',' << (t.truncated ? 1 : 0) << '\n';
            }
            if (!f) throw std::runtime_error("failed writing '" + o.out_path + "'");
        }
    } else {
        throw UsageError("--mode must be one of plain, reflected, impulse, coupled, search; got '" + o.mode + "'");
    }
    emit_json(out, j);
    return kSuccess;
}

int cmd_plan(const Options& o, std::ostream& out) {
    const ModelParams params = model_from(o.model);
    if (!(o.eps_target > 0.0 && o.eps_target < 1.0)) {
        throw UsageError("--eps-target must lie in (0, 1), got " + format_sig(o.eps_target));
    }
    const EpsilonPlan plan = plan_epsilon_optimal(params, o.eps_target);
    Json j;
    j["schema"] = 1;
    j["command"] = "plan";
    j["c"] = num(params.c);
    j["pi_hat"] = num(params.prior);
    j["eps_target"] = num(plan.eps_target);
    j["pi_star"] = num(plan.pi_star);
    j["expected_tau"] = num(plan.expected_tau);
    j["t_bound"] = num(plan.t_bound);
    j["log_coupling_coeff"] = num(plan.log_coupling_coeff);
    j["feasible"] = plan.feasible;
    if (plan.feasible) {
        j["eps2"] = num(plan.eps2);
    } else {
        j["eps2"] = nullptr;
        j["notice"] = "eps2 underflows: 16 t e^(32 t) eps2^2 + eps2 < eps_target/2 has no positive double solution";
    }
    emit_json(out, j);
    return kSuccess;
}

int cmd_risk(const Options& o, std::ostream& out, const EnvLookup& env) {
    const ModelParams params = model_from(o.model);
    const std::uint64_t seed = resolve_seed(o, env);
    const SimGrid grid = grid_from(o, seed);
    if (o.n < 100) throw UsageError("--n must be at least 100");
    const ThresholdSolution sol = solve_threshold(params);
    const double level = o.threshold_given ? o.threshold : sol.pi_star;
    if (!(level > params.prior && level < 1.0)) {
        throw UsageError("--threshold must lie in (pi_hat, 1), got " + format_sig(level));
    }
    const RiskEstimate est = estimate_risk_at_threshold(params, level, grid, o.n);
    const double analytic = value(sol, params.prior);
    Json j;
    j["schema"] = 1;
    j["command"] = "risk";
    j["c"] = num(params.c);
    j["pi_hat"] = num(params.prior);
    j["pi_star"] = num(sol.pi_star);
    j["threshold"] = num(level);
    j["dt"] = num(o.dt);
    j["n"] = o.n;
    j["seed"] = seed;
    j["value_at_prior"] = num(analytic);
    j["mean"] = num(est.mean);
    j["std_err"] = num(est.std_err);
    j["rel_diff"] = num((est.mean - analytic) / analytic);
    emit_json(out, j);
    return kSuccess;
}

}  // namespace

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

TableSpec table_spec(int id) {
    const std::vector<double> costs{0.0025, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1};
    const std::vector<double> priors{0.025, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
    switch (id) {
        case 1: return {1, "pi_hat", 0.5, "c", costs};
        case 2: return {2, "pi_hat", 0.75, "c", costs};
        case 3: return {3, "c", 0.01, "pi_hat", priors};
        case 4: return {4, "c", 0.03, "pi_hat", priors};
        default: throw UsageError("--id must be 1, 2, 3 or 4, got " + std::to_string(id));
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"Bayesian quickest search: thresholds, tables, simulation and planning"};
    app.require_subcommand(1);
    Options o;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--c", o.model.c, "Observation cost per unit time")->required();
        sub->add_option("--pi-hat", o.model.pi_hat, "Prior probability that a channel has drift 1")->required();
    };
    auto add_seed = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "RNG seed (default: $SEED or 0)")
            ->each([&](const std::string&) { o.seed_given = true; });
    };

    auto* threshold = app.add_subcommand("threshold", "Optimal threshold and value-function constants");
    add_model(threshold);
    threshold->add_option("--tol", o.tol, "Bisection tolerance");
    threshold->add_option("--format", o.format, "json or csv");

    auto* table = app.add_subcommand("table", "Reproduce a published threshold table");
    table->add_option("--id", o.table_id, "Table number 1-4")->required();
    table->add_option("--format", o.format, "csv (default) or json");

    auto* simulate = app.add_subcommand("simulate", "Simulate posterior paths or search trials");
    simulate->add_option("--mode", o.mode, "plain, reflected, impulse, coupled or search")->required();
    add_model(simulate);
    simulate->add_option("--eps", o.eps, "Impulse / switching offset below pi_hat");
    simulate->add_option("--dt", o.dt, "Time step");
    simulate->add_option("--horizon", o.horizon, "Simulated time (coupling time t for mode=coupled)");
    simulate->add_option("--n", o.n, "Number of paths or trials");
    add_seed(simulate);
    simulate->add_option("--out", o.out_path, "CSV file for path 0 or the trial log");

    auto* plan = app.add_subcommand("plan", "Plan an eps-optimal switching strategy");
    add_model(plan);
    plan->add_option("--eps-target", o.eps_target, "Overall optimality gap")->required();

    auto* risk = app.add_subcommand("risk", "Monte Carlo risk of the reflected problem vs the value function");
    add_model(risk);
    risk->add_option("--dt", o.dt, "Time step");
    risk->add_option("--n", o.n, "Number of paths");
    add_seed(risk);
    risk->add_option("--threshold", o.threshold, "Stopping level (default: optimal pi_star)")
        ->each([&](const std::string&) { o.threshold_given = true; });

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (threshold->parsed()) return cmd_threshold(o, out, err);
        if (table->parsed()) return cmd_table(o, out);
        if (simulate->parsed()) return cmd_simulate(o, out, env);
        if (plan->parsed()) return cmd_plan(o, out);
        if (risk->parsed()) return cmd_risk(o, out, env);
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kUsageError;
}

}  // namespace qsearch::cli
