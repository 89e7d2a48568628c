#include "medliab/analysis.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "medliab/parallel.hpp"
#include "medliab/physician.hpp"
#include "medliab/queueing.hpp"
#include "medliab/scenario.hpp"

namespace medliab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_real(std::string_view text, std::string_view what) {
    const std::string s(text);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw std::invalid_argument("malformed " + std::string(what) + " '" + s + "'");
    return v;
}

Mode winner_at(const ModelParams& base, double lambda, double big_l, const SolverOptions& solver) {
    ModelParams p = base;
    p.lambda = lambda;
    p.big_l = big_l;
    return optimize_platform(validate(p), 0.0, 1.0, solver).winner;
}

}  // namespace

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 1) throw std::invalid_argument("grid needs at least one point");
    if (points == 1) return {lo};
    std::vector<double> v(static_cast<std::size_t>(points));
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) v[i] = lo + i * step;
    v.back() = hi;
    return v;
}

GridSpec GridSpec::parse(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw std::invalid_argument("grid must look like name=lo:hi:npoints, got '" + std::string(text) + "'");
    GridSpec g;
    g.name = std::string(text.substr(0, eq));
    auto rest = text.substr(eq + 1);
    const auto c1 = rest.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : rest.find(':', c1 + 1);
    if (c2 == std::string_view::npos)
        throw std::invalid_argument("grid must look like name=lo:hi:npoints, got '" + std::string(text) + "'");
    g.lo = parse_real(rest.substr(0, c1), "grid bound");
    g.hi = parse_real(rest.substr(c1 + 1, c2 - c1 - 1), "grid bound");
    const double n = parse_real(rest.substr(c2 + 1), "grid point count");
    if (n < 1 || n != std::floor(n) || n > 1e6) throw std::invalid_argument("grid point count must be a positive integer");
    g.points = static_cast<int>(n);
    return g;
}

std::vector<RegimeCell> regime_map(const ModelParams& p, std::span<const double> lambda_grid,
                                   std::span<const double> l_grid, const SweepOptions& opts) {
    if (lambda_grid.empty() || l_grid.empty()) throw std::invalid_argument("regime map grids must be non-empty");
    std::vector<RegimeCell> cells(lambda_grid.size() * l_grid.size());
    parallel_for(cells.size(), opts.jobs, [&](std::size_t k) {
        RegimeCell& c = cells[k];
        c.lambda = lambda_grid[k / l_grid.size()];
        c.big_l = l_grid[k % l_grid.size()];
        try {
            ModelParams cell = p;
            cell.lambda = c.lambda;
            cell.big_l = c.big_l;
            const auto opt = optimize_platform(validate(cell), 0.0, 1.0, opts.solver);
            c.winner = opt.winner;
            c.theta_star = opt.best().best.theta;
            c.n_star = opt.best().best.n;
            c.total = opt.best().cost.total;
        } catch (const std::exception& e) {
            c.error = e.what();
        }
    });
    return cells;
}

BoundaryReport regime_boundary(const ModelParams& p, std::span<const double> lambda_grid, double l_lo, double l_hi,
                               double tol, const SweepOptions& opts) {
    if (!(l_lo > 0 && l_lo < l_hi)) throw std::invalid_argument("boundary search needs 0 < l_lo < l_hi");
    if (!(tol > 0)) throw std::invalid_argument("boundary tolerance must be positive");

    struct PerLambda {
        std::vector<BoundaryPoint> crossings;
    };
    std::vector<PerLambda> found(lambda_grid.size());
    const auto scan = linspace(l_lo, l_hi, kBoundaryPrescan);

    parallel_for(lambda_grid.size(), opts.jobs, [&](std::size_t i) {
        const double lambda = lambda_grid[i];
        std::vector<Mode> winners(scan.size());
        for (std::size_t k = 0; k < scan.size(); ++k) winners[k] = winner_at(p, lambda, scan[k], opts.solver);
        for (std::size_t k = 0; k + 1 < scan.size(); ++k) {
            if (winners[k] == winners[k + 1]) continue;
            double lo = scan[k];
            double hi = scan[k + 1];
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                if (winner_at(p, lambda, mid, opts.solver) == winners[k]) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            found[i].crossings.push_back({lambda, 0.5 * (lo + hi), winners[k], winners[k + 1]});
        }
    });

    BoundaryReport report;
    report.tol = tol;
    const BoundaryPoint* prev = nullptr;
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        const auto& xs = found[i].crossings;
        if (xs.empty()) report.lambdas_without_boundary.push_back(lambda_grid[i]);
        if (xs.size() > 1) report.lambdas_with_multiple_crossings.push_back(lambda_grid[i]);
        report.points.insert(report.points.end(), xs.begin(), xs.end());
        if (xs.size() != 1) {
            prev = nullptr;
            continue;
        }
        const BoundaryPoint& cur = report.points.back();
        if (prev && cur.l_boundary < prev->l_boundary - 2.0 * tol)
            report.violations.push_back({prev->lambda, cur.lambda, prev->l_boundary, cur.l_boundary});
        prev = &report.points.back();
    }
    return report;
}

std::vector<SweepRow> sensitivity_sweep(const ModelParams& p, std::string_view name, std::span<const double> grid,
                                        const SweepOptions& opts) {
    if (std::find(std::begin(kSweepParams), std::end(kSweepParams), name) == std::end(kSweepParams)) {
        std::string valid;
        for (auto v : kSweepParams) valid += (valid.empty() ? "" : ", ") + std::string(v);
        throw std::invalid_argument("cannot sweep '" + std::string(name) + "'; valid parameters: " + valid);
    }
    std::vector<ModelParams> points;
    points.reserve(grid.size());
    for (double v : grid) {
        ModelParams q = p;
        field(q, name) = v;
        points.push_back(validate(q));
    }
    std::vector<SweepRow> rows(grid.size());
    parallel_for(grid.size(), opts.jobs, [&](std::size_t i) {
        const auto opt = optimize_platform(points[i], 0.0, 1.0, opts.solver);
        rows[i] = {std::string(name), grid[i], opt.best().best.theta, opt.best().best.n, opt.best().cost.total,
                   opt.winner};
    });
    return rows;
}

std::vector<WelfareRow> welfare_curve(const ModelParams& p, std::span<const double> l_grid, const SweepOptions& opts) {
    std::vector<ModelParams> points;
    for (double l : l_grid) {
        ModelParams q = p;
        q.big_l = l;
        points.push_back(validate(q));
    }
    std::vector<WelfareRow> rows(l_grid.size());
    parallel_for(l_grid.size(), opts.jobs, [&](std::size_t i) {
        const auto s1 = run_scenario(ScenarioSpec::make(ScenarioId::S1), points[i], opts.solver);
        const auto s4 = run_scenario(ScenarioSpec::make(ScenarioId::S4), points[i], opts.solver);
        WelfareRow& r = rows[i];
        r.big_l = l_grid[i];
        r.s1_total = s1.cost.total;
        r.s4_total = s4.cost.total;
        r.gap = r.s1_total - r.s4_total;
        r.gap_pct = 100.0 * r.gap / r.s4_total;
    });
    return rows;
}

FigureId parse_figure_id(std::string_view s) {
    if (s == "fig1") return FigureId::fig1;
    if (s == "fig2") return FigureId::fig2;
    if (s == "fig3a") return FigureId::fig3a;
    if (s == "fig3b") return FigureId::fig3b;
    if (s == "fig4") return FigureId::fig4;
    throw std::invalid_argument("unknown figure '" + std::string(s) + "' (expected fig1, fig2, fig3a, fig3b, fig4)");
}

StaffingCriterion parse_staffing_criterion(std::string_view s) {
    if (s == "cost-optimal") return StaffingCriterion::cost_optimal;
    if (s == "min-stable") return StaffingCriterion::min_stable;
    throw std::invalid_argument("unknown staffing criterion '" + std::string(s) +
                                "' (expected cost-optimal or min-stable)");
}

Table figure_data(FigureId which, const ModelParams& p, const FigureOptions& opts) {
    auto grid_or = [&](double lo, double hi, int n) { return opts.grid ? *opts.grid : linspace(lo, hi, n); };
    Table t;
    switch (which) {
        case FigureId::fig1: {
            t.columns = {"n", "utilization", "delay_prob"};
            const auto util = grid_or(0.01, 0.99, 99);
            for (int n : {6, 10, 15}) {
                for (double u : util) t.rows.push_back({std::int64_t{n}, u, erlang_c(n, u * n)});
            }
            break;
        }
        case FigureId::fig2: {
            t.columns = {"theta", "u_a", "u_i", "best_response"};
            for (double theta : grid_or(0.0, 1.0, 101)) {
                t.rows.push_back({theta, physician_utility(Mode::A, theta, p), physician_utility(Mode::I, theta, p),
                                  std::string(to_string(best_response(theta, p)))});
            }
            break;
        }
        case FigureId::fig3a: {
            t.columns = {"big_l", "theta_d"};
            for (double l : grid_or(800.0, 5000.0, 25)) {
                ModelParams q = p;
                q.big_l = l;
                t.rows.push_back({l, threshold(validate(q)).theta_d});
            }
            break;
        }
        case FigureId::fig3b: {
            t.columns = {"delta_k", "theta_d"};
            for (double dk : grid_or(10.0, 150.0, 25)) {
                ModelParams q = p;
                q.k_i = q.k_a + dk;
                t.rows.push_back({dk, threshold(validate(q)).theta_d});
            }
            break;
        }
        case FigureId::fig4: {
            t.columns = {"lambda", "n_a", "n_i"};
            for (double lambda : grid_or(25.0, 90.0, 25)) {
                ModelParams q = p;
                q.lambda = lambda;
                validate(q);
                auto staffing = [&](Mode m) -> Cell {
                    if (opts.staffing == StaffingCriterion::min_stable)
                        return std::int64_t{min_staffing(lambda, mode_attrs(m, q).service_rate)};
                    const double theta_d = threshold(q).theta_d;
                    const auto r = m == Mode::A
                                       ? optimize_regime(m, 0.0, std::min(1.0, theta_d), q, opts.solver)
                                       : optimize_regime(m, theta_d + opts.solver.regime_epsilon, 1.0, q, opts.solver);
                    if (!r.feasible) return kNaN;
                    return std::int64_t{r.best.n};
                };
                t.rows.push_back({lambda, staffing(Mode::A), staffing(Mode::I)});
            }
            break;
        }
    }
    return t;
}

Table regime_map_table(std::span<const RegimeCell> cells) {
    Table t;
    t.columns = {"lambda", "big_l", "winner", "theta_star", "n_star", "total", "error"};
    for (const auto& c : cells) {
        if (c.winner) {
            t.rows.push_back({c.lambda, c.big_l, std::string(to_string(*c.winner)), c.theta_star,
                              std::int64_t{c.n_star}, c.total, std::monostate{}});
        } else {
            std::string msg = c.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            t.rows.push_back({c.lambda, c.big_l, std::monostate{}, std::monostate{}, std::monostate{},
                              std::monostate{}, msg});
        }
    }
    return t;
}

Table boundary_table(const BoundaryReport& report) {
    Table t;
    t.columns = {"lambda", "l_boundary", "below", "above"};
    for (const auto& b : report.points)
        t.rows.push_back({b.lambda, b.l_boundary, std::string(to_string(b.below)), std::string(to_string(b.above))});
    return t;
}

Table sweep_table(std::span<const SweepRow> rows) {
    Table t;
    t.columns = {"param_name", "param_value", "theta_star", "n_star", "total", "winner"};
    for (const auto& r : rows)
        t.rows.push_back({r.param_name, r.param_value, r.theta_star, std::int64_t{r.n_star}, r.total,
                          std::string(to_string(r.winner))});
    return t;
}

Table welfare_table(std::span<const WelfareRow> rows) {
    Table t;
    t.columns = {"big_l", "s1_total", "s4_total", "gap", "gap_pct"};
    for (const auto& r : rows) t.rows.push_back({r.big_l, r.s1_total, r.s4_total, r.gap, r.gap_pct});
    return t;
}

}  // namespace medliab
