#include "medliab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "medliab/analysis.hpp"
#include "medliab/parallel.hpp"
#include "medliab/params.hpp"
#include "medliab/physician.hpp"
#include "medliab/platform.hpp"
#include "medliab/queueing.hpp"
#include "medliab/scenario.hpp"
#include "medliab/simulator.hpp"
#include "medliab/table.hpp"

#ifndef MEDLIAB_VERSION
#define MEDLIAB_VERSION "dev"
#endif

namespace medliab::cli {

std::string version() { return MEDLIAB_VERSION; }

int dispatch_with(const std::vector<std::string>& args, std::optional<ConfigFile> injected, std::ostream& out,
                  std::ostream& err);

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Usage-level failure detected after CLI11 parsing (bad grid name, missing flag combination).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Validation checks ran and at least one failed.
class ChecksFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string config;
    std::string out;
    bool json = false;
    bool thousands = false;
    unsigned jobs = default_jobs();
    double epsilon = 1e-6;
};

struct Context {
    std::string command;
    std::vector<std::string> args;           // subcommand arguments as given
    std::optional<ConfigFile> injected;      // set by rerun
    std::ostream& out;
    std::ostream& err;
};

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ConfigFile resolve_config(const CommonOptions& common, const Context& ctx, std::string& source) {
    if (ctx.injected) {
        source = "<manifest>";
        return *ctx.injected;
    }
    std::string path = common.config;
    if (path.empty()) {
        if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
    }
    if (path.empty() || (path == "baseline" && !fs::exists(path))) {
        source = "<baseline>";
        return ConfigFile{};
    }
    source = path;
    return load_config(path);
}

ordered_json params_json(const ConfigFile& cfg) {
    ordered_json j;
    for (auto name : kParamNames) j[std::string(name)] = field(cfg.params, name);
    j["alpha"] = cfg.scenario.alpha;
    j["theta_floor"] = cfg.scenario.theta_floor;
    return j;
}

ConfigFile params_from_json(const ordered_json& j) {
    ConfigFile cfg;
    for (auto name : kParamNames) field(cfg.params, name) = j.at(std::string(name)).get<double>();
    cfg.scenario.alpha = j.at("alpha").get<double>();
    cfg.scenario.theta_floor = j.at("theta_floor").get<double>();
    validate(cfg.params);
    return cfg;
}

ordered_json cost_json(const CostBreakdown& c) {
    return {{"risk", c.risk},
            {"congestion", c.congestion},
            {"staffing", c.staffing},
            {"compliance", c.compliance},
            {"total", c.total}};
}

// Drops flags that bind a run to local paths; the manifest stores resolved values instead.
std::vector<std::string> portable_args(const std::vector<std::string>& args) {
    static const std::vector<std::string> path_flags = {"--config", "--out", "--boundary-out"};
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        bool dropped = false;
        for (const auto& f : path_flags) {
            if (a == f) {
                ++i;
                dropped = true;
            } else if (a.rfind(f + "=", 0) == 0) {
                dropped = true;
            }
        }
        if (!dropped) kept.push_back(a);
    }
    return kept;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write '" + path + "'");
    os << content;
    if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

void write_manifest(const Context& ctx, const ConfigFile& cfg, const std::string& config_source,
                    const std::vector<std::string>& outputs, ordered_json options) {
    ordered_json m;
    m["command"] = ctx.command;
    m["args"] = portable_args(ctx.args);
    m["config_source"] = config_source;
    m["params"] = params_json(cfg);
    m["options"] = std::move(options);
    m["tool_version"] = version();
    m["timestamp"] = utc_timestamp();
    m["outputs"] = outputs;
    write_file(outputs.front() + ".json", m.dump(2) + "\n");
}

// Writes the table to --out (plus manifest) or to stdout.
void emit(const Context& ctx, const CommonOptions& common, const ConfigFile& cfg, const std::string& source,
          const Table& table, ordered_json options, std::vector<std::string> extra_outputs = {}) {
    if (common.out.empty()) {
        write_csv(ctx.out, table);
        return;
    }
    write_file(common.out, to_csv(table));
    std::vector<std::string> outputs{common.out};
    outputs.insert(outputs.end(), extra_outputs.begin(), extra_outputs.end());
    write_manifest(ctx, cfg, source, outputs, std::move(options));
}

void scale_columns(Table& t, std::initializer_list<std::string_view> names, double factor) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (std::find(names.begin(), names.end(), t.columns[c]) == names.end()) continue;
        for (auto& row : t.rows) {
            if (auto* v = std::get_if<double>(&row[c])) *v /= factor;
        }
    }
}

SolverOptions solver_options(const CommonOptions& c) {
    SolverOptions s;
    s.regime_epsilon = c.epsilon;
    return s;
}

SweepOptions sweep_options(const CommonOptions& c) { return {solver_options(c), c.jobs}; }

std::vector<double> grid_values(const std::vector<std::string>& flags, std::string_view name, double lo, double hi,
                                int points) {
    for (const auto& f : flags) {
        const auto g = GridSpec::parse(f);
        if (g.name == name) return g.values();
    }
    return linspace(lo, hi, points);
}

void require_grid_names(const std::vector<std::string>& flags, std::initializer_list<std::string_view> allowed) {
    for (const auto& f : flags) {
        const auto g = GridSpec::parse(f);
        if (std::find(allowed.begin(), allowed.end(), g.name) == allowed.end()) {
            std::string names;
            for (auto a : allowed) names += (names.empty() ? "" : ", ") + std::string(a);
            throw UsageError("grid '" + g.name + "' not accepted here (expected " + names + ")");
        }
    }
}

void add_common(CLI::App* app, CommonOptions& c, bool with_out = true) {
    app->add_option("--config", c.config, std::string("Parameter file (default: $") + kConfigEnv + " or built-in baseline)");
    if (with_out) app->add_option("--out", c.out, "Write CSV here (plus <out>.json manifest) instead of stdout");
    app->add_flag("--thousands", c.thousands, "Report currency in thousands of dollars per hour");
    app->add_option("--jobs", c.jobs, "Worker threads for sweeps")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--epsilon", c.epsilon, "Gap above theta_d where Regime I starts")
        ->capture_default_str()
        ->check(CLI::Range(1e-15, 0.5));
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct SolveOptions {
    CommonOptions common;
    double theta_lo = 0.0;
    double theta_hi = 1.0;
};

int run_solve(const SolveOptions& o, Context& ctx) {
    std::string source;
    const auto cfg = resolve_config(o.common, ctx, source);
    if (!(o.theta_lo >= 0 && o.theta_hi <= 1 && o.theta_lo <= o.theta_hi))
        throw UsageError("theta bounds must satisfy 0 <= theta-lo <= theta-hi <= 1");
    const auto opt = optimize_platform(cfg.params, o.theta_lo, o.theta_hi, solver_options(o.common));
    const auto th = threshold(cfg.params);
    const double scale = o.common.thousands ? 1000.0 : 1.0;

    Table t;
    t.columns = {"regime",     "feasible",  "winner",   "theta",   "n",       "risk",     "congestion", "staffing",
                 "compliance", "total",     "theta_unconstrained", "theta_lo", "theta_hi", "n_first", "n_last", "theta_d"};
    for (const auto* r : {&opt.regime_a, &opt.regime_i}) {
        const bool win = r->regime == opt.winner;
        if (r->feasible) {
            t.rows.push_back({std::string(to_string(r->regime)), std::int64_t{1}, std::int64_t{win}, r->best.theta,
                              std::int64_t{r->best.n}, r->cost.risk, r->cost.congestion, r->cost.staffing,
                              r->cost.compliance, r->cost.total, r->theta_unconstrained, r->theta_lo, r->theta_hi,
                              std::int64_t{r->n_first}, std::int64_t{r->n_last}, th.theta_d});
        } else {
            t.rows.push_back({std::string(to_string(r->regime)), std::int64_t{0}, std::int64_t{0}, std::monostate{},
                              std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                              std::monostate{}, std::monostate{}, r->theta_lo, r->theta_hi, std::monostate{},
                              std::monostate{}, th.theta_d});
        }
    }
    scale_columns(t, {"risk", "congestion", "staffing", "compliance", "total"}, scale);

    const auto& best = opt.best();
    if (o.common.json) {
        ordered_json j;
        j["winner"] = std::string(to_string(opt.winner));
        j["theta_d"] = th.theta_d;
        for (const auto* r : {&opt.regime_a, &opt.regime_i}) {
            ordered_json rj;
            rj["feasible"] = r->feasible;
            rj["theta_lo"] = r->theta_lo;
            rj["theta_hi"] = r->theta_hi;
            if (r->feasible) {
                rj["theta"] = r->best.theta;
                rj["n"] = r->best.n;
                rj["cost"] = cost_json(r->cost);
                rj["theta_unconstrained"] = r->theta_unconstrained;
                rj["n_searched"] = {r->n_first, r->n_last};
            } else {
                rj["reason"] = r->reason;
            }
            j[std::string("regime_") + std::string(to_string(r->regime))] = rj;
        }
        ctx.out << j.dump(2) << "\n";
    } else {
        const auto& c = best.cost;
        ctx.out << "Regime " << to_string(opt.winner) << ", theta=" << fixed(best.best.theta, 2)
                << ", N=" << best.best.n << "\n";
        ctx.out << "  theta*      = " << format_real(best.best.theta) << "\n";
        ctx.out << "  risk        = " << format_real(c.risk / scale) << "\n";
        ctx.out << "  congestion  = " << format_real(c.congestion / scale) << "\n";
        ctx.out << "  staffing    = " << format_real(c.staffing / scale) << "\n";
        ctx.out << "  compliance  = " << format_real(c.compliance / scale) << "\n";
        ctx.out << "  total       = " << format_real(c.total / scale) << (o.common.thousands ? " k$/h" : " $/h")
                << "\n";
        ctx.out << "  theta_d     = " << format_real(th.theta_d) << "\n";
        const auto& other = opt.runner_up();
        if (other.feasible) {
            ctx.out << "Other regime: Regime " << to_string(other.regime) << ", theta=" << format_real(other.best.theta)
                    << ", N=" << other.best.n << ", total=" << format_real(other.cost.total / scale) << "\n";
        } else {
            ctx.out << "Other regime: " << other.reason << "\n";
        }
    }
    if (!o.common.out.empty()) {
        write_file(o.common.out, to_csv(t));
        write_manifest(ctx, cfg, source, {o.common.out},
                       {{"theta_lo", o.theta_lo}, {"theta_hi", o.theta_hi}, {"epsilon", o.common.epsilon},
                        {"thousands", o.common.thousands}});
    }
    return kExitOk;
}

int run_threshold(const CommonOptions& o, Context& ctx) {
    std::string source;
    const auto cfg = resolve_config(o, ctx, source);
    const auto th = threshold(cfg.params);
    Table t;
    t.columns = {"theta_d", "d_dq", "d_dh", "d_dl", "d_ddelta_k"};
    t.rows.push_back({th.theta_d, th.d_dq, th.d_dh, th.d_dl, th.d_ddelta_k});
    if (o.json) {
        ordered_json j{{"theta_d", th.theta_d}, {"d_dq", th.d_dq}, {"d_dh", th.d_dh}, {"d_dl", th.d_dl},
                       {"d_ddelta_k", th.d_ddelta_k}};
        ctx.out << j.dump(2) << "\n";
    } else {
        ctx.out << "theta_d = " << fixed(th.theta_d, 2) << " (" << format_real(th.theta_d) << ")\n";
        ctx.out << "d theta_d / d q         = " << format_real(th.d_dq) << "\n";
        ctx.out << "d theta_d / d h         = " << format_real(th.d_dh) << "\n";
        ctx.out << "d theta_d / d big_l     = " << format_real(th.d_dl) << "\n";
        ctx.out << "d theta_d / d (k_i-k_a) = " << format_real(th.d_ddelta_k) << "\n";
    }
    if (!o.out.empty()) {
        write_file(o.out, to_csv(t));
        write_manifest(ctx, cfg, source, {o.out}, ordered_json::object());
    }
    return kExitOk;
}

struct ScenarioCmd {
    CommonOptions common;
    std::string scenarios = "S0,S1,S2,S3,S4";
    std::optional<double> alpha;
    std::optional<double> theta_floor;
};

int run_scenario_cmd(const ScenarioCmd& o, Context& ctx) {
    std::string source;
    const auto cfg = resolve_config(o.common, ctx, source);
    const double alpha = o.alpha.value_or(cfg.scenario.alpha);
    const double floor = o.theta_floor.value_or(cfg.scenario.theta_floor);
    std::vector<ScenarioSpec> specs;
    for (auto id : parse_scenario_list(o.scenarios)) specs.push_back(ScenarioSpec::make(id, alpha, floor));
    const auto table = compare_scenarios(specs, cfg.params, solver_options(o.common), o.common.jobs);
    const double scale = o.common.thousands ? 1000.0 : 1.0;

    Table t;
    t.columns = {"id", "mode", "theta", "n", "risk", "congestion", "staffing", "compliance", "total", "pct_vs_s1"};
    for (const auto& row : table.rows) {
        const auto& r = row.result;
        const Cell pct = row.pct_vs_s1 ? Cell{*row.pct_vs_s1} : Cell{};
        if (r.feasible) {
            t.rows.push_back({std::string(to_string(r.id)), std::string(to_string(r.policy.mode)), r.policy.theta,
                              std::int64_t{r.policy.n}, r.cost.risk / scale, r.cost.congestion / scale,
                              r.cost.staffing / scale, r.cost.compliance / scale, r.cost.total / scale, pct});
        } else {
            t.rows.push_back({std::string(to_string(r.id)), {}, {}, {}, {}, {}, {}, {}, {}, {}});
            ctx.err << "note: " << to_string(r.id) << " infeasible: " << r.reason << "\n";
        }
    }
    bool has_s0 = false;
    for (const auto& s : specs) has_s0 |= s.id == ScenarioId::S0;
    if (has_s0) {
        ctx.err << "note: S0 is evaluated under the platform cost model at its cost-minimizing staffing "
                   "(Mode I forced, theta=0.5); an 18.7k $/h S0 benchmark is not reproducible from "
                   "baseline parameters under this model\n";
    }
    if (table.welfare_gap) {
        ctx.err << "welfare gap S1-S4 = " << format_real(*table.welfare_gap / scale) << " ("
                << fixed(*table.gap_pct_of_s1, 1) << "% of S1, " << fixed(*table.gap_pct_of_s4, 1) << "% of S4)\n";
    }

    ordered_json options{{"scenarios", o.scenarios}, {"alpha", alpha}, {"theta_floor", floor},
                         {"epsilon", o.common.epsilon}, {"thousands", o.common.thousands}};
    if (o.common.json) {
        ordered_json j;
        j["rows"] = ordered_json::array();
        for (const auto& row : table.rows) {
            const auto& r = row.result;
            ordered_json rj{{"id", std::string(to_string(r.id))}, {"feasible", r.feasible}};
            if (r.feasible) {
                rj["mode"] = std::string(to_string(r.policy.mode));
                rj["regime"] = r.regime ? ordered_json(std::string(to_string(*r.regime))) : ordered_json(nullptr);
                rj["theta"] = r.policy.theta;
                rj["n"] = r.policy.n;
                rj["cost"] = cost_json(r.cost);
                rj["pct_vs_s1"] = row.pct_vs_s1 ? ordered_json(*row.pct_vs_s1) : ordered_json(nullptr);
            } else {
                rj["reason"] = r.reason;
            }
            j["rows"].push_back(rj);
        }
        auto opt_json = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
        j["welfare_gap"] = opt_json(table.welfare_gap);
        j["gap_pct_of_s1"] = opt_json(table.gap_pct_of_s1);
        j["gap_pct_of_s4"] = opt_json(table.gap_pct_of_s4);
        ctx.out << j.dump(2) << "\n";
        if (!o.common.out.empty()) {
            write_file(o.common.out, to_csv(t));
            write_manifest(ctx, cfg, source, {o.common.out}, options);
        }
        return kExitOk;
    }
    emit(ctx, o.common, cfg, source, t, options);
    return kExitOk;
}

struct RegimeMapCmd {
    CommonOptions common;
    std::vector<std::string> grids;
    std::string boundary_out;
    double tol = 1.0;
};

int run_regime_map(const RegimeMapCmd& o, Context& ctx) {
    std::string source;
    const auto cfg = resolve_config(o.common, ctx, source);
    require_grid_names(o.grids, {"lambda", "big_l"});
    const auto lambdas = grid_values(o.grids, "lambda", 25.0, 90.0, 25);
    const auto losses = grid_values(o.grids, "big_l", 800.0, 5000.0, 25);
    const auto cells = regime_map(cfg.params, lambdas, losses, sweep_options(o.common));
    auto t = regime_map_table(cells);
    scale_columns(t, {"total"}, o.common.thousands ? 1000.0 : 1.0);

    std::vector<std::string> extra;
    ordered_json options{{"lambda_grid", lambdas}, {"big_l_grid", losses}, {"epsilon", o.common.epsilon},
                         {"thousands", o.common.thousands}};
    if (!o.boundary_out.empty()) {
        const auto report = regime_boundary(cfg.params, lambdas, losses.front(), losses.back(), o.tol,
                                            sweep_options(o.common));
        write_file(o.boundary_out, to_csv(boundary_table(report)));
        extra.push_back(o.boundary_out);
        options["boundary_tol"] = o.tol;
        for (const auto& v : report.violations) {
            ctx.err << "boundary not nondecreasing: L=" << format_real(v.l_at_lo) << " at lambda="
                    << format_real(v.lambda_lo) << " -> L=" << format_real(v.l_at_hi) << " at lambda="
                    << format_real(v.lambda_hi) << "\n";
        }
        for (double l : report.lambdas_with_multiple_crossings)
            ctx.err << "multiple regime crossings at lambda=" << format_real(l) << "\n";
        ordered_json violations = ordered_json::array();
        for (const auto& v : report.violations)
            violations.push_back({{"lambda_lo", v.lambda_lo}, {"lambda_hi", v.lambda_hi}, {"l_at_lo", v.l_at_lo},
                                  {"l_at_hi", v.l_at_hi}});
        options["boundary_violations"] = violations;
    }
    emit(ctx, o.common, cfg, source, t, options, extra);
    return kExitOk;
}

struct SweepCmd {
    CommonOptions common;
    std::string grid;
};

int run_sweep(const SweepCmd& o, Context& ctx) {
    std::string source;
    const auto cfg = resolve_config(o.common, ctx, source);
    const auto g = GridSpec::parse(o.grid);
    const auto rows = sensitivity_sweep(cfg.params, g.name, g.values(), sweep_options(o.common));
    auto t = sweep_table(rows);
    scale_columns(t, {"total"}, o.common.thousands ? 1000.0 : 1.0);
    emit(ctx, o.common, cfg, source, t,
         {{"grid", o.grid}, {"epsilon", o.common.epsilon}, {"thousands", o.common.thousands}});
    return kExitOk;
}

struct WelfareCmd {
    CommonOptions common;
    std::vector<std::string> grids;
};

int run_welfare(const WelfareCmd& o, Context& ctx) {
    std::string source;
    const auto cfg = resolve_config(o.common, ctx, source);
    require_grid_names(o.grids, {"big_l"});
    const auto losses = grid_values(o.grids, "big_l", 800.0, 5000.0, 25);
    auto t = welfare_table(welfare_curve(cfg.params, losses, sweep_options(o.common)));
    scale_columns(t, {"s1_total", "s4_total", "gap"}, o.common.thousands ? 1000.0 : 1.0);
    emit(ctx, o.common, cfg, source, t,
         {{"big_l_grid", losses}, {"epsilon", o.common.epsilon}, {"thousands", o.common.thousands}});
    return kExitOk;
}

struct FigureCmd {
    CommonOptions common;
    std::string which;
    std::vector<std::string> grids;
    std::string staffing = "cost-optimal";
};

int run_figure(const FigureCmd& o, Context& ctx) {
    std::string source;
    const auto cfg = resolve_config(o.common, ctx, source);
    const auto which = parse_figure_id(o.which);
    FigureOptions fo;
    fo.solver = solver_options(o.common);
    fo.staffing = parse_staffing_criterion(o.staffing);
    static const std::string_view axis[] = {"utilization", "theta", "big_l", "delta_k", "lambda"};
    const auto axis_name = axis[static_cast<int>(which)];
    if (o.grids.size() > 1) throw UsageError("figure accepts at most one --grid");
    if (!o.grids.empty()) {
        const auto g = GridSpec::parse(o.grids.front());
        if (g.name != axis_name)
            throw UsageError("grid for " + o.which + " must be named '" + std::string(axis_name) + "'");
        fo.grid = g.values();
    }
    const auto t = figure_data(which, cfg.params, fo);
    ordered_json options{{"which", o.which}, {"staffing", o.staffing}, {"epsilon", o.common.epsilon}};
    if (fo.grid) options["grid"] = *fo.grid;
    emit(ctx, o.common, cfg, source, t, options);
    return kExitOk;
}

struct SimulateCmd {
    std::string out;
    double lambda = 50.0;
    double mu = 12.0;
    int n = 5;
    std::int64_t customers = 200000;
    std::int64_t warmup = -1;
    std::uint64_t seed = 1;
    double error_prob = 0.0;
};

int run_simulate(const SimulateCmd& o, Context& ctx) {
    SimConfig cfg{o.lambda, o.mu, o.n, o.customers, o.warmup, o.seed, o.error_prob};
    const auto r = simulate(cfg);
    const auto analytic = queue_metrics(o.lambda, o.mu, o.n);
    Table t;
    t.columns = {"lambda",     "mu",          "n",           "customers",      "warmup",     "seed",
                 "mean_wait",  "wait_stderr", "analytic_w_q", "mean_system_time", "system_time_stderr",
                 "utilization", "utilization_stderr", "analytic_rho", "error_rate", "error_rate_stderr"};
    t.rows.push_back({o.lambda, o.mu, std::int64_t{o.n}, std::int64_t{o.customers}, std::int64_t{cfg.effective_warmup()},
                      std::to_string(o.seed), r.mean_wait, r.wait_stderr, analytic.w_q, r.mean_system_time,
                      r.system_time_stderr, r.utilization, r.utilization_stderr, analytic.rho, r.error_rate,
                      r.error_rate_stderr});
    if (o.out.empty()) {
        write_csv(ctx.out, t);
        return kExitOk;
    }
    write_file(o.out, to_csv(t));
    write_manifest(ctx, ConfigFile{}, "<flags>", {o.out},
                   {{"rng", std::string(kRngAlgorithm)}, {"batches", kBatchCount}, {"seed", o.seed}});
    return kExitOk;
}

struct ValidateCmd {
    std::int64_t customers = 200000;
    int seeds = 50;
    std::uint64_t seed = 1;
    unsigned jobs = default_jobs();
};

int run_validate(const ValidateCmd& o, Context& ctx) {
    ValidationOptions vo{o.customers, o.seeds, o.seed, o.jobs};
    const auto checks = run_validation_suite(vo);
    bool all = true;
    char line[256];
    std::snprintf(line, sizeof line, "%-6s %-32s %14s %14s %14s\n", "status", "check", "expected", "observed", "bound");
    ctx.out << line;
    for (const auto& c : checks) {
        all &= c.passed;
        std::snprintf(line, sizeof line, "%-6s %-32s %14.8g %14.8g %14.8g\n", c.passed ? "PASS" : "FAIL",
                      c.name.c_str(), c.expected, c.observed, c.bound);
        ctx.out << line;
    }
    ctx.out << "rng: " << kRngAlgorithm << ", customers=" << o.customers << ", seeds=" << o.seeds << "\n";
    if (!all) throw ChecksFailed("simulation validation failed");
    return kExitOk;
}

struct RerunCmd {
    std::string manifest;
    std::string out;
};

int run_rerun(const RerunCmd& o, Context& ctx) {
    std::ifstream in(o.manifest);
    if (!in) throw ConfigError("cannot open manifest '" + o.manifest + "'");
    ordered_json m;
    try {
        m = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed manifest '" + o.manifest + "': " + e.what());
    }
    const auto command = m.at("command").get<std::string>();
    if (command == "rerun") throw UsageError("manifest records a rerun");
    auto args = m.at("args").get<std::vector<std::string>>();
    const auto outputs = m.at("outputs").get<std::vector<std::string>>();
    args.insert(args.begin(), command);
    args.push_back("--out");
    args.push_back(o.out.empty() ? outputs.front() : o.out);
    std::optional<ConfigFile> injected;
    if (command != "simulate") injected = params_from_json(m.at("params"));

    // Re-enter the dispatcher with the recorded parameters in place of a config file.
    return dispatch_with(args, std::move(injected), ctx.out, ctx.err);
}

}  // namespace

int dispatch_with(const std::vector<std::string>& args, std::optional<ConfigFile> injected, std::ostream& out,
                  std::ostream& err) {
    CLI::App app{"Liability-share and staffing solver for AI-assisted consultation platforms", "medliab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version());

    SolveOptions solve;
    auto* solve_cmd = app.add_subcommand("solve", "Optimal (theta, N, mode) for the platform");
    add_common(solve_cmd, solve.common);
    solve_cmd->add_flag("--json", solve.common.json, "Print JSON instead of the text summary");
    solve_cmd->add_option("--theta-lo", solve.theta_lo, "Lower bound on the liability share")->capture_default_str();
    solve_cmd->add_option("--theta-hi", solve.theta_hi, "Upper bound on the liability share")->capture_default_str();

    CommonOptions thresh;
    auto* thresh_cmd = app.add_subcommand("threshold", "Physician indifference share and its partial derivatives");
    add_common(thresh_cmd, thresh);
    thresh_cmd->add_flag("--json", thresh.json, "Print JSON");

    ScenarioCmd scen;
    auto* scen_cmd = app.add_subcommand("scenario", "Compare policy scenarios S0-S4");
    add_common(scen_cmd, scen.common);
    scen_cmd->add_flag("--json", scen.common.json, "Print JSON to stdout");
    scen_cmd->add_option("--scenarios", scen.scenarios, "Comma-separated scenario ids")->capture_default_str();
    scen_cmd->add_option("--alpha", scen.alpha, "S2 minimum platform liability fraction (default 0.5)")
        ->check(CLI::Range(0.0, 1.0));
    scen_cmd->add_option("--theta-floor", scen.theta_floor, "S3 minimum physician share (default 0.3)")
        ->check(CLI::Range(0.0, 1.0));

    RegimeMapCmd rmap;
    auto* rmap_cmd = app.add_subcommand("regime-map", "Winning regime over a (lambda, big_l) grid");
    add_common(rmap_cmd, rmap.common);
    rmap_cmd->add_option("--grid", rmap.grids, "lambda=lo:hi:n and/or big_l=lo:hi:n (defaults 25:90:25, 800:5000:25)");
    rmap_cmd->add_option("--boundary-out", rmap.boundary_out, "Also extract the regime boundary to this CSV");
    rmap_cmd->add_option("--tol", rmap.tol, "Boundary bisection tolerance in dollars")->capture_default_str()
        ->check(CLI::PositiveNumber);

    SweepCmd sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Re-optimize across one parameter");
    add_common(sweep_cmd, sweep.common);
    sweep_cmd->add_option("--grid", sweep.grid, "name=lo:hi:n with name in kappa, c_n, big_l, q, c_w, lambda")
        ->required();

    WelfareCmd welfare;
    auto* welfare_cmd = app.add_subcommand("welfare", "S1 vs S4 totals across loss severity");
    add_common(welfare_cmd, welfare.common);
    welfare_cmd->add_option("--grid", welfare.grids, "big_l=lo:hi:n (default 800:5000:25)");

    FigureCmd fig;
    auto* fig_cmd = app.add_subcommand("figure", "Plot-ready data: fig1, fig2, fig3a, fig3b, fig4");
    add_common(fig_cmd, fig.common);
    fig_cmd->add_option("--which", fig.which, "Figure id")->required();
    fig_cmd->add_option("--grid", fig.grids, "Override the x grid, e.g. lambda=25:90:14");
    fig_cmd->add_option("--staffing", fig.staffing, "fig4 criterion: cost-optimal or min-stable")
        ->capture_default_str();

    SimulateCmd sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Discrete-event M/M/N simulation");
    sim_cmd->add_option("--lambda", sim.lambda, "Arrival rate")->capture_default_str();
    sim_cmd->add_option("--mu", sim.mu, "Service rate per server")->capture_default_str();
    sim_cmd->add_option("--n", sim.n, "Servers")->capture_default_str();
    sim_cmd->add_option("--customers", sim.customers, "Customers to simulate")->capture_default_str();
    sim_cmd->add_option("--warmup", sim.warmup, "Customers discarded (default 10%)");
    sim_cmd->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
    sim_cmd->add_option("--error-prob", sim.error_prob, "Per-case error probability")->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "Write CSV here (plus <out>.json manifest)");

    ValidateCmd val;
    auto* val_cmd = app.add_subcommand("validate", "Simulation vs analytic queueing checks");
    val_cmd->add_option("--customers", val.customers, "Customers per replication")->capture_default_str();
    val_cmd->add_option("--seeds", val.seeds, "Replications for the coverage check")->capture_default_str()
        ->check(CLI::Range(2, 100000));
    val_cmd->add_option("--seed", val.seed, "First seed")->capture_default_str();
    val_cmd->add_option("--jobs", val.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    RerunCmd rerun;
    auto* rerun_cmd = app.add_subcommand("rerun", "Repeat a run from its <out>.json manifest");
    rerun_cmd->add_option("--manifest", rerun.manifest, "Manifest path")->required();
    rerun_cmd->add_option("--out", rerun.out, "Output path (default: the recorded one)");

    if (!args.empty() && !args.front().empty() && args.front().front() != '-') {
        const auto subs = app.get_subcommands([](const CLI::App*) { return true; });
        bool known = false;
        std::string names;
        for (const auto* s : subs) {
            known |= s->get_name() == args.front();
            names += (names.empty() ? "" : ", ") + s->get_name();
        }
        if (!known) {
            err << "error: unknown command '" << args.front() << "'; available commands: " << names << "\n";
            return kExitUsage;
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Context ctx{"", args.empty() ? std::vector<std::string>{} : std::vector<std::string>(args.begin() + 1, args.end()),
                std::move(injected), out, err};
    try {
        if (*solve_cmd) return ctx.command = "solve", run_solve(solve, ctx);
        if (*thresh_cmd) return ctx.command = "threshold", run_threshold(thresh, ctx);
        if (*scen_cmd) return ctx.command = "scenario", run_scenario_cmd(scen, ctx);
        if (*rmap_cmd) return ctx.command = "regime-map", run_regime_map(rmap, ctx);
        if (*sweep_cmd) return ctx.command = "sweep", run_sweep(sweep, ctx);
        if (*welfare_cmd) return ctx.command = "welfare", run_welfare(welfare, ctx);
        if (*fig_cmd) return ctx.command = "figure", run_figure(fig, ctx);
        if (*sim_cmd) return ctx.command = "simulate", run_simulate(sim, ctx);
        if (*val_cmd) return ctx.command = "validate", run_validate(val, ctx);
        if (*rerun_cmd) return ctx.command = "rerun", run_rerun(rerun, ctx);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ChecksFailed& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::domain_error& e) {  // unstable, infeasible
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const SearchLimitError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::invalid_argument& e) {  // validation, bad grids and ids
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return dispatch_with(args, std::nullopt, out, err);
}

}  // namespace medliab::cli
