#pragma once

// Parameter sweeps, the (lambda, L) regime map with boundary extraction,
// welfare-gap curves and figure-data emitters. Every row is an independent
// re-optimization at its own parameter point.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medliab/platform.hpp"
#include "medliab/table.hpp"

namespace medliab {

/// Inclusive evenly spaced grid; a single point yields {lo}.
[[nodiscard]] std::vector<double> linspace(double lo, double hi, int points);

/// Parsed `name=lo:hi:npoints` grid flag.
struct GridSpec {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    int points = 0;

    [[nodiscard]] static GridSpec parse(std::string_view text);
    [[nodiscard]] std::vector<double> values() const { return linspace(lo, hi, points); }
};

struct SweepOptions {
    SolverOptions solver;
    unsigned jobs = 1;
};

// ---------------------------------------------------------------------------
// Regime map
// ---------------------------------------------------------------------------

struct RegimeCell {
    double lambda = 0.0;
    double big_l = 0.0;
    std::optional<Mode> winner;  // empty when the cell's optimizer failed
    double theta_star = 0.0;
    int n_star = 0;
    double total = 0.0;
    std::string error;
};

/// Cells in lambda-major order: index = i_lambda * l_grid.size() + i_l.
[[nodiscard]] std::vector<RegimeCell> regime_map(const ModelParams& p, std::span<const double> lambda_grid,
                                                 std::span<const double> l_grid, const SweepOptions& opts = {});

struct BoundaryPoint {
    double lambda = 0.0;
    double l_boundary = 0.0;
    Mode below = Mode::A;  // winner just below l_boundary
    Mode above = Mode::I;
};

struct MonotonicityViolation {
    double lambda_lo, lambda_hi;
    double l_at_lo, l_at_hi;
};

struct BoundaryReport {
    std::vector<BoundaryPoint> points;               // ordered by lambda, then L
    std::vector<double> lambdas_without_boundary;
    std::vector<double> lambdas_with_multiple_crossings;
    std::vector<MonotonicityViolation> violations;   // adjacent lambdas where the boundary drops
    double tol = 1.0;
};

inline constexpr int kBoundaryPrescan = 20;

/// For each lambda, pre-scans [l_lo, l_hi] at kBoundaryPrescan points and bisects every winner
/// flip to `tol` dollars. Every crossing found is reported. Adjacent lambdas with a single
/// crossing each are compared, and a drop in the boundary larger than 2 tol is recorded as a
/// monotonicity violation.
[[nodiscard]] BoundaryReport regime_boundary(const ModelParams& p, std::span<const double> lambda_grid, double l_lo,
                                             double l_hi, double tol = 1.0, const SweepOptions& opts = {});

// ---------------------------------------------------------------------------
// Sensitivity and welfare
// ---------------------------------------------------------------------------

inline constexpr std::string_view kSweepParams[] = {"kappa", "c_n", "big_l", "q", "c_w", "lambda"};

struct SweepRow {
    std::string param_name;
    double param_value = 0.0;
    double theta_star = 0.0;
    int n_star = 0;
    double total = 0.0;
    Mode winner = Mode::A;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Throws std::invalid_argument for names outside kSweepParams and ValidationError for
/// grid values that break the parameter orderings.
[[nodiscard]] std::vector<SweepRow> sensitivity_sweep(const ModelParams& p, std::string_view name,
                                                      std::span<const double> grid, const SweepOptions& opts = {});

struct WelfareRow {
    double big_l = 0.0;
    double s1_total = 0.0;
    double s4_total = 0.0;
    double gap = 0.0;      // s1 - s4
    double gap_pct = 0.0;  // 100 gap / s4
};

[[nodiscard]] std::vector<WelfareRow> welfare_curve(const ModelParams& p, std::span<const double> l_grid,
                                                    const SweepOptions& opts = {});

// ---------------------------------------------------------------------------
// Figure data
// ---------------------------------------------------------------------------

enum class FigureId { fig1, fig2, fig3a, fig3b, fig4 };
enum class StaffingCriterion { cost_optimal, min_stable };

[[nodiscard]] FigureId parse_figure_id(std::string_view s);
[[nodiscard]] StaffingCriterion parse_staffing_criterion(std::string_view s);

struct FigureOptions {
    /// Overrides the figure's x grid (utilization, theta, L, delta_k or lambda).
    std::optional<std::vector<double>> grid;
    StaffingCriterion staffing = StaffingCriterion::cost_optimal;
    SolverOptions solver;
};

/// fig1: n, utilization, delay_prob for n in {6, 10, 15}
/// fig2: theta, u_a, u_i, best_response
/// fig3a: big_l, theta_d;  fig3b: delta_k, theta_d (k_i = k_a + delta_k)
/// fig4: lambda, n_a, n_i under the selected staffing criterion; cost-optimal uses each
///       mode's regime interval and reports nan where that regime is empty
[[nodiscard]] Table figure_data(FigureId which, const ModelParams& p, const FigureOptions& opts = {});

// ---------------------------------------------------------------------------
// Table builders
// ---------------------------------------------------------------------------

[[nodiscard]] Table regime_map_table(std::span<const RegimeCell> cells);
[[nodiscard]] Table boundary_table(const BoundaryReport& report);
[[nodiscard]] Table sweep_table(std::span<const SweepRow> rows);
[[nodiscard]] Table welfare_table(std::span<const WelfareRow> rows);

}  // namespace medliab
