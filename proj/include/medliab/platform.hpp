#pragma once

// Platform side of the game: the four-component cost, the per-regime
// constrained problem and the two-regime decomposition.

#include <stdexcept>
#include <string>

#include "medliab/params.hpp"

namespace medliab {

struct Policy {
    double theta = 0.0;
    int n = 0;
    Mode mode = Mode::A;

    friend bool operator==(const Policy&, const Policy&) = default;
};

/// Dollars per hour. total is the sum of the four components.
struct CostBreakdown {
    double risk = 0.0;
    double congestion = 0.0;
    double staffing = 0.0;
    double compliance = 0.0;
    double total = 0.0;

    friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

struct RegimeResult {
    Mode regime = Mode::A;
    bool feasible = false;
    Policy best;
    CostBreakdown cost;
    double theta_lo = 0.0;
    double theta_hi = 0.0;
    double theta_unconstrained = 0.0;  // at best.n
    int n_first = 0;                   // staffing range actually enumerated
    int n_last = 0;
    std::string reason;                // set when infeasible
};

struct PlatformOptimum {
    RegimeResult regime_a;
    RegimeResult regime_i;
    Mode winner = Mode::A;

    [[nodiscard]] const RegimeResult& best() const noexcept {
        return winner == Mode::A ? regime_a : regime_i;
    }
    [[nodiscard]] const RegimeResult& runner_up() const noexcept {
        return winner == Mode::A ? regime_i : regime_a;
    }
};

struct SocialOptimum {
    Policy policy;  // theta reported as 0
    CostBreakdown cost;
};

struct SolverOptions {
    /// Regime I is searched on [theta_d + regime_epsilon, hi].
    double regime_epsilon = 1e-6;
    /// Staffing enumeration fails loudly past this many physicians.
    int staffing_cap = 10000;
};

/// No feasible policy exists for the requested constraint set.
class InfeasibleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The staffing enumeration ran past SolverOptions::staffing_cap.
class SearchLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Platform cost at (theta, n) with physicians in mode m:
/// risk lambda (1-theta) L P_m, congestion lambda c_w T_m, staffing c_N n, compliance kappa theta^2 n.
[[nodiscard]] CostBreakdown cost_breakdown(double theta, int n, Mode m, const ModelParams& p);

/// Stationary point lambda L P_m / (2 kappa n) of the platform cost in theta.
[[nodiscard]] double theta_unconstrained(Mode m, int n, const ModelParams& p);

/// Projection of theta_unconstrained onto [lo, hi]; the cost is strictly convex in theta,
/// so this is the unique minimizer on the interval.
[[nodiscard]] double theta_optimal(Mode m, int n, double lo, double hi, const ModelParams& p);

/// Minimizes platform cost with mode fixed to `regime` over theta in [lo, hi] and stable n.
/// Enumerates n upward from the first stable staffing level and stops once c_N n alone
/// exceeds the incumbent. Ties in n go to the smaller n. An empty interval yields
/// feasible = false.
[[nodiscard]] RegimeResult optimize_regime(Mode regime, double theta_lo, double theta_hi,
                                           const ModelParams& p, const SolverOptions& opts = {});

/// Solves Regime A on [lo, min(hi, theta_d)] and Regime I on [max(lo, theta_d + eps), hi], then
/// keeps the cheaper one (ties to A). Throws InfeasibleError if neither regime is feasible.
[[nodiscard]] PlatformOptimum optimize_platform(const ModelParams& p, double theta_lo = 0.0,
                                                double theta_hi = 1.0, const SolverOptions& opts = {});

/// Welfare objective: full expected loss lambda L P_m plus congestion and staffing.
/// Compliance is excluded.
[[nodiscard]] CostBreakdown social_cost(int n, Mode m, const ModelParams& p);

[[nodiscard]] SocialOptimum optimize_social(const ModelParams& p, const SolverOptions& opts = {});

}  // namespace medliab
