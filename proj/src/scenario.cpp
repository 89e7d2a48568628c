#include "medliab/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "medliab/parallel.hpp"
#include "medliab/queueing.hpp"

namespace medliab {

std::string_view to_string(ScenarioId id) noexcept {
    switch (id) {
        case ScenarioId::S0: return "S0";
        case ScenarioId::S1: return "S1";
        case ScenarioId::S2: return "S2";
        case ScenarioId::S3: return "S3";
        case ScenarioId::S4: return "S4";
    }
    return "?";
}

ScenarioId parse_scenario_id(std::string_view s) {
    for (auto id : {ScenarioId::S0, ScenarioId::S1, ScenarioId::S2, ScenarioId::S3, ScenarioId::S4}) {
        if (s == to_string(id)) return id;
    }
    throw std::invalid_argument("unknown scenario '" + std::string(s) + "' (expected S0..S4)");
}

std::vector<ScenarioId> parse_scenario_list(std::string_view s) {
    std::vector<ScenarioId> ids;
    while (!s.empty()) {
        const auto comma = s.find(',');
        ids.push_back(parse_scenario_id(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    if (ids.empty()) throw std::invalid_argument("empty scenario list");
    return ids;
}

ScenarioSpec ScenarioSpec::make(ScenarioId id, double alpha, double theta_floor) {
    ScenarioSpec s;
    s.id = id;
    s.alpha = alpha;
    s.theta_floor = theta_floor;
    switch (id) {
        case ScenarioId::S0:
            s.mode_forced = Mode::I;
            s.theta_fixed = 0.5;
            break;
        case ScenarioId::S1: break;
        case ScenarioId::S2: s.theta_hi = 1.0 - alpha; break;
        case ScenarioId::S3: s.theta_lo = theta_floor; break;
        case ScenarioId::S4: s.objective = Objective::social; break;
    }
    s.check();
    return s;
}

void ScenarioSpec::check() const {
    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument(std::string(to_string(id)) + ": " + msg);
    };
    if (!(theta_lo >= 0.0 && theta_hi <= 1.0)) fail("liability bounds must lie in [0, 1]");
    switch (id) {
        case ScenarioId::S0:
            if (mode_forced != Mode::I || !theta_fixed || *theta_fixed != 0.5 || objective != Objective::platform)
                fail("requires Mode I, theta fixed at 0.5, platform objective");
            break;
        case ScenarioId::S1:
            if (objective != Objective::platform) fail("requires platform objective");
            break;
        case ScenarioId::S2:
            if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
            if (theta_hi != 1.0 - alpha) fail("theta_hi must equal 1 - alpha");
            break;
        case ScenarioId::S3:
            if (!(theta_floor >= 0.0 && theta_floor <= 1.0)) fail("theta_floor must lie in [0, 1]");
            if (theta_lo != theta_floor) fail("theta_lo must equal theta_floor");
            break;
        case ScenarioId::S4:
            if (objective != Objective::social) fail("requires social objective");
            break;
    }
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const ModelParams& p, const SolverOptions& opts) {
    spec.check();
    ScenarioResult r;
    r.id = spec.id;

    if (spec.objective == Objective::social) {
        const auto opt = optimize_social(p, opts);
        r.policy = opt.policy;
        r.cost = opt.cost;
        r.feasible = true;
        return r;
    }

    if (spec.mode_forced && spec.theta_fixed) {
        // Administrative mode: no best-response constraint, only n is free.
        const auto rr = optimize_regime(*spec.mode_forced, *spec.theta_fixed, *spec.theta_fixed, p, opts);
        r.policy = rr.best;
        r.cost = rr.cost;
        r.feasible = rr.feasible;
        r.reason = rr.reason;
        return r;
    }

    try {
        const auto opt = optimize_platform(p, spec.theta_lo, spec.theta_hi, opts);
        const auto& best = opt.best();
        r.policy = best.best;
        r.cost = best.cost;
        r.regime = opt.winner;
        r.feasible = true;
    } catch (const InfeasibleError& e) {
        r.feasible = false;
        r.reason = e.what();
    }
    return r;
}

ScenarioTable compare_scenarios(std::span<const ScenarioSpec> specs, const ModelParams& p, const SolverOptions& opts,
                                unsigned jobs) {
    if (specs.empty()) throw std::invalid_argument("no scenarios requested");
    std::vector<ScenarioSpec> ordered(specs.begin(), specs.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return static_cast<int>(a.id) < static_cast<int>(b.id); });

    std::vector<ScenarioResult> results(ordered.size());
    parallel_for(ordered.size(), jobs, [&](std::size_t i) { results[i] = run_scenario(ordered[i], p, opts); });

    auto total_of = [&](ScenarioId id) -> std::optional<double> {
        for (const auto& r : results)
            if (r.id == id && r.feasible) return r.cost.total;
        return std::nullopt;
    };
    const auto s1 = total_of(ScenarioId::S1);
    const auto s4 = total_of(ScenarioId::S4);

    ScenarioTable table;
    for (auto& r : results) {
        ComparisonRow row{r, std::nullopt};
        if (s1 && r.feasible) row.pct_vs_s1 = 100.0 * (r.cost.total - *s1) / *s1;
        table.rows.push_back(std::move(row));
    }
    if (s1 && s4) {
        table.welfare_gap = *s1 - *s4;
        table.gap_pct_of_s1 = 100.0 * *table.welfare_gap / *s1;
        table.gap_pct_of_s4 = 100.0 * *table.welfare_gap / *s4;
    }
    return table;
}

}  // namespace medliab
