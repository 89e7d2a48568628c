#pragma once

// The five policy scenarios as constrained instances of the platform and
// social optimizers.
//
//   S0  human-only benchmark: Mode I forced, theta fixed at 0.5, staffing optimized
//   S1  flexible contracting: theta in [0, 1], endogenous mode
//   S2  minimum platform liability: theta <= 1 - alpha
//   S3  minimum physician liability: theta >= theta_floor
//   S4  social benchmark: full loss internalized, no compliance cost

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medliab/platform.hpp"

namespace medliab {

enum class ScenarioId { S0, S1, S2, S3, S4 };
enum class Objective { platform, social };

[[nodiscard]] std::string_view to_string(ScenarioId id) noexcept;
[[nodiscard]] ScenarioId parse_scenario_id(std::string_view s);
/// Comma-separated ids, e.g. "S0,S1,S4".
[[nodiscard]] std::vector<ScenarioId> parse_scenario_list(std::string_view s);

struct ScenarioSpec {
    ScenarioId id = ScenarioId::S1;
    std::optional<double> theta_fixed;
    double theta_lo = 0.0;
    double theta_hi = 1.0;
    std::optional<Mode> mode_forced;
    Objective objective = Objective::platform;
    double alpha = 0.5;        // S2 only
    double theta_floor = 0.3;  // S3 only

    /// Canonical spec for `id`. alpha and theta_floor only matter for S2 and S3.
    [[nodiscard]] static ScenarioSpec make(ScenarioId id, double alpha = 0.5, double theta_floor = 0.3);

    /// Throws std::invalid_argument when the spec does not match its id's shape.
    void check() const;
};

struct ScenarioResult {
    ScenarioId id = ScenarioId::S1;
    Policy policy;
    CostBreakdown cost;
    std::optional<Mode> regime;  // empty for S0 and S4, where mode is not induced by theta
    bool feasible = false;
    std::string reason;
};

[[nodiscard]] ScenarioResult run_scenario(const ScenarioSpec& spec, const ModelParams& p,
                                          const SolverOptions& opts = {});

struct ComparisonRow {
    ScenarioResult result;
    std::optional<double> pct_vs_s1;  // 100 (total - S1) / S1
};

struct ScenarioTable {
    std::vector<ComparisonRow> rows;  // ordered by id
    std::optional<double> welfare_gap;    // S1 - S4
    std::optional<double> gap_pct_of_s1;  // 100 gap / S1
    std::optional<double> gap_pct_of_s4;  // 100 gap / S4
};

/// Runs each spec (concurrently when jobs > 1) and tabulates them in id order.
[[nodiscard]] ScenarioTable compare_scenarios(std::span<const ScenarioSpec> specs, const ModelParams& p,
                                              const SolverOptions& opts = {}, unsigned jobs = 1);

}  // namespace medliab
