#include <gtest/gtest.h>

#include <cmath>

#include "medliab/analysis.hpp"
#include "medliab/physician.hpp"
#include "medliab/scenario.hpp"
#include "oracles.hpp"

namespace medliab {
namespace {

TEST(Grid, LinspaceEndpointsExact) {
    const auto g = linspace(0.8, 0.94, 15);
    ASSERT_EQ(g.size(), 15u);
    EXPECT_EQ(g.front(), 0.8);
    EXPECT_EQ(g.back(), 0.94);
    EXPECT_EQ(linspace(3, 7, 1), std::vector<double>{3});
}

TEST(Grid, ParseFlag) {
    const auto g = GridSpec::parse("kappa=1000:5000:5");
    EXPECT_EQ(g.name, "kappa");
    EXPECT_EQ(g.values(), (std::vector<double>{1000, 2000, 3000, 4000, 5000}));
    EXPECT_THROW((void)GridSpec::parse("kappa=1000:5000"), std::invalid_argument);
    EXPECT_THROW((void)GridSpec::parse("kappa:1:2:3"), std::invalid_argument);
    EXPECT_THROW((void)GridSpec::parse("kappa=1:2:0"), std::invalid_argument);
    EXPECT_THROW((void)GridSpec::parse("kappa=1:2:2.5"), std::invalid_argument);
}

TEST(RegimeMap, BaselineCellAndHighLossCorner) {
    const std::vector<double> lambdas{30, 50};
    const std::vector<double> ls{2000, 5000};
    const auto cells = regime_map(ModelParams::baseline(), lambdas, ls);
    ASSERT_EQ(cells.size(), 4u);
    EXPECT_EQ(cells[2].lambda, 50);
    EXPECT_EQ(cells[2].big_l, 2000);
    EXPECT_EQ(cells[2].winner, Mode::A);
    EXPECT_EQ(cells[1].lambda, 30);
    EXPECT_EQ(cells[1].big_l, 5000);
    EXPECT_EQ(cells[1].winner, Mode::I);
}

TEST(RegimeMap, CellsEqualIndependentSolves) {
    const auto lambdas = linspace(25, 90, 4);
    const auto ls = linspace(800, 5000, 4);
    SweepOptions opts;
    opts.jobs = 3;
    const auto cells = regime_map(ModelParams::baseline(), lambdas, ls, opts);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        for (std::size_t j = 0; j < ls.size(); ++j) {
            auto p = ModelParams::baseline();
            p.lambda = lambdas[i];
            p.big_l = ls[j];
            const auto r = optimize_platform(p);
            const auto& c = cells[i * ls.size() + j];
            EXPECT_EQ(c.winner, r.winner);
            EXPECT_EQ(c.n_star, r.best().best.n);
            EXPECT_EQ(c.total, r.best().cost.total);
        }
    }
}

TEST(RegimeMap, BothRegimesPresentOnFullGrid) {
    SweepOptions opts;
    opts.jobs = 2;
    const auto cells = regime_map(ModelParams::baseline(), linspace(25, 90, 25), linspace(800, 5000, 25), opts);
    int a = 0, i = 0;
    for (const auto& c : cells) {
        ASSERT_TRUE(c.winner) << c.error;
        (*c.winner == Mode::A ? a : i)++;
    }
    EXPECT_GT(a, 0);
    EXPECT_GT(i, 0);
}

TEST(Boundary, BisectionBracketsTheFlip) {
    const std::vector<double> lambdas{50};
    const auto rep = regime_boundary(ModelParams::baseline(), lambdas, 800, 5000, 1.0);
    ASSERT_FALSE(rep.points.empty());
    const auto& b = rep.points.front();
    EXPECT_GT(b.l_boundary, 2000);
    EXPECT_LT(b.l_boundary, 5000);
    auto winner_at = [](double l) {
        auto p = ModelParams::baseline();
        p.big_l = l;
        return optimize_platform(p).winner;
    };
    EXPECT_EQ(winner_at(b.l_boundary - rep.tol), b.below);
    EXPECT_EQ(winner_at(b.l_boundary + rep.tol), b.above);
    EXPECT_NE(b.below, b.above);
}

TEST(Boundary, ReportIsConsistent) {
    const auto lambdas = linspace(25, 90, 8);
    const auto rep = regime_boundary(ModelParams::baseline(), lambdas, 800, 5000, 1.0);
    std::size_t covered = rep.lambdas_without_boundary.size();
    for (double l : lambdas) {
        bool has = false;
        for (const auto& pt : rep.points) has |= pt.lambda == l;
        covered += has;
    }
    EXPECT_EQ(covered, lambdas.size());
    for (const auto& v : rep.violations) {
        EXPECT_LT(v.lambda_lo, v.lambda_hi);
        EXPECT_LT(v.l_at_hi, v.l_at_lo - 2 * rep.tol);
    }
}

TEST(Sweep, ComplianceCostLowersLiabilityShare) {
    const auto grid = linspace(1000, 5000, 9);
    const auto rows = sensitivity_sweep(ModelParams::baseline(), "kappa", grid);
    ASSERT_EQ(rows.size(), grid.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].winner == rows[i - 1].winner && rows[i].n_star == rows[i - 1].n_star)
            EXPECT_LE(rows[i].theta_star, rows[i - 1].theta_star + 1e-12);
        EXPECT_GE(rows[i].total, rows[i - 1].total - 1e-9);
    }
}

TEST(Sweep, StaffingCostNeverRaisesHeadcount) {
    const auto rows = sensitivity_sweep(ModelParams::baseline(), "c_n", linspace(100, 350, 11));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].winner == rows[i - 1].winner) EXPECT_LE(rows[i].n_star, rows[i - 1].n_star);
    }
}

TEST(Sweep, RowsEqualIndependentSolves) {
    const auto grid = linspace(50, 200, 4);
    SweepOptions opts;
    opts.jobs = 2;
    const auto rows = sensitivity_sweep(ModelParams::baseline(), "c_w", grid, opts);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto p = ModelParams::baseline();
        p.c_w = grid[i];
        const auto r = optimize_platform(p);
        EXPECT_EQ(rows[i].param_name, "c_w");
        EXPECT_EQ(rows[i].param_value, grid[i]);
        EXPECT_EQ(rows[i].theta_star, r.best().best.theta);
        EXPECT_EQ(rows[i].n_star, r.best().best.n);
        EXPECT_EQ(rows[i].total, r.best().cost.total);
    }
}

TEST(Sweep, InvalidInputs) {
    const std::vector<double> grid{1.0};
    EXPECT_THROW((void)sensitivity_sweep(ModelParams::baseline(), "mu_a", grid), std::invalid_argument);
    const std::vector<double> bad_q{0.99};
    EXPECT_THROW((void)sensitivity_sweep(ModelParams::baseline(), "q", bad_q), ValidationError);
}

TEST(Welfare, MatchesScenarioRuns) {
    const std::vector<double> ls{1000, 2000, 3000};
    const auto rows = welfare_curve(ModelParams::baseline(), ls);
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& r : rows) {
        auto p = ModelParams::baseline();
        p.big_l = r.big_l;
        const double s1 = run_scenario(ScenarioSpec::make(ScenarioId::S1), p).cost.total;
        const double s4 = run_scenario(ScenarioSpec::make(ScenarioId::S4), p).cost.total;
        EXPECT_EQ(r.s1_total, s1);
        EXPECT_EQ(r.s4_total, s4);
        EXPECT_DOUBLE_EQ(r.gap, s1 - s4);
        EXPECT_DOUBLE_EQ(r.gap_pct, 100 * (s1 - s4) / s4);
    }
    EXPECT_NEAR(rows[1].gap, 1499.66, 0.01);
}

TEST(Figures, DelayCurves) {
    const auto t = figure_data(FigureId::fig1, ModelParams::baseline());
    EXPECT_EQ(t.columns, (std::vector<std::string>{"n", "utilization", "delay_prob"}));
    ASSERT_EQ(t.rows.size(), 3u * 99u);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const int n = static_cast<int>(std::get<std::int64_t>(t.rows[i][0]));
        const double u = std::get<double>(t.rows[i][1]);
        EXPECT_NEAR(std::get<double>(t.rows[i][2]), oracle::erlang_c_direct(n, u * n), 1e-10);
    }
}

TEST(Figures, UtilityCrossing) {
    const auto t = figure_data(FigureId::fig2, ModelParams::baseline());
    ASSERT_EQ(t.rows.size(), 101u);
    EXPECT_EQ(std::get<std::string>(t.rows[60][3]), "A");
    EXPECT_EQ(std::get<std::string>(t.rows[61][3]), "I");
}

TEST(Figures, ThresholdCurves) {
    const auto a = figure_data(FigureId::fig3a, ModelParams::baseline());
    for (std::size_t i = 1; i < a.rows.size(); ++i)
        EXPECT_LT(std::get<double>(a.rows[i][1]), std::get<double>(a.rows[i - 1][1]));
    FigureOptions opts;
    opts.grid = std::vector<double>{60.0};
    const auto b = figure_data(FigureId::fig3b, ModelParams::baseline(), opts);
    ASSERT_EQ(b.rows.size(), 1u);
    EXPECT_NEAR(std::get<double>(b.rows[0][1]), 0.60, 1e-12);
}

TEST(Figures, StaffingCurves) {
    FigureOptions opts;
    opts.grid = std::vector<double>{50.0};
    opts.staffing = StaffingCriterion::min_stable;
    const auto m = figure_data(FigureId::fig4, ModelParams::baseline(), opts);
    EXPECT_EQ(std::get<std::int64_t>(m.rows[0][1]), 5);
    EXPECT_EQ(std::get<std::int64_t>(m.rows[0][2]), 9);
    opts.staffing = StaffingCriterion::cost_optimal;
    const auto c = figure_data(FigureId::fig4, ModelParams::baseline(), opts);
    EXPECT_EQ(std::get<std::int64_t>(c.rows[0][1]), 5);
    EXPECT_EQ(std::get<std::int64_t>(c.rows[0][2]), 9);
    EXPECT_THROW((void)parse_staffing_criterion("cheapest"), std::invalid_argument);
    EXPECT_THROW((void)parse_figure_id("fig9"), std::invalid_argument);
}

TEST(Table, CsvEncoding) {
    Table t;
    t.columns = {"a", "b", "c", "d"};
    t.rows.push_back({1.0 / 3.0, std::int64_t{7}, std::string("A"), std::monostate{}});
    t.rows.push_back({std::nan(""), -0.0, std::string("x"), 1e-20});
    EXPECT_EQ(to_csv(t), "a,b,c,d\n0.333333333333,7,A,\nnan,0,x,1e-20\n");
}

}  // namespace
}  // namespace medliab
