#include "medliab/platform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "medliab/physician.hpp"
#include "medliab/queueing.hpp"

namespace medliab {

namespace {

void require_share(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("liability share must lie in [0, 1], got " + std::to_string(theta));
}

double congestion_cost(int n, Mode m, const ModelParams& p) {
    const auto mu = mode_attrs(m, p).service_rate;
    return p.lambda * p.c_w * queue_metrics(p.lambda, mu, n).t_total;
}

// Walks n upward from the first stable level, keeping the cheapest evaluation.
// `eval(n)` returns the cost record for a given n.
template <class Eval>
auto enumerate_staffing(Mode m, const ModelParams& p, const SolverOptions& opts, Eval eval, int& n_first,
                        int& n_last) {
    const double mu = mode_attrs(m, p).service_rate;
    n_first = first_stable_staffing(p.lambda, mu);
    int best_n = n_first;
    auto best = eval(n_first);
    int n = n_first + 1;
    for (;; ++n) {
        if (p.c_n * n > best.total) break;
        if (n > opts.staffing_cap) {
            throw SearchLimitError("staffing enumeration exceeded cap of " + std::to_string(opts.staffing_cap) +
                                   " physicians");
        }
        auto candidate = eval(n);
        if (candidate.total < best.total) {
            best = candidate;
            best_n = n;
        }
    }
    n_last = n - 1;
    return std::pair{best_n, best};
}

}  // namespace

CostBreakdown cost_breakdown(double theta, int n, Mode m, const ModelParams& p) {
    require_share(theta);
    const auto attrs = mode_attrs(m, p);
    CostBreakdown c;
    c.risk = p.lambda * (1.0 - theta) * p.big_l * attrs.error_prob;
    c.congestion = congestion_cost(n, m, p);
    c.staffing = p.c_n * n;
    c.compliance = p.kappa * theta * theta * n;
    c.total = c.risk + c.congestion + c.staffing + c.compliance;
    return c;
}

double theta_unconstrained(Mode m, int n, const ModelParams& p) {
    if (n < 1) throw std::invalid_argument("staffing must be at least 1");
    return p.lambda * p.big_l * mode_attrs(m, p).error_prob / (2.0 * p.kappa * n);
}

double theta_optimal(Mode m, int n, double lo, double hi, const ModelParams& p) {
    if (!(lo <= hi)) throw std::invalid_argument("empty liability interval");
    return std::clamp(theta_unconstrained(m, n, p), lo, hi);
}

RegimeResult optimize_regime(Mode regime, double theta_lo, double theta_hi, const ModelParams& p,
                             const SolverOptions& opts) {
    RegimeResult r;
    r.regime = regime;
    r.theta_lo = theta_lo;
    r.theta_hi = theta_hi;
    if (!(theta_lo >= 0.0 && theta_hi <= 1.0)) throw std::invalid_argument("liability interval must lie in [0, 1]");
    if (!(theta_lo <= theta_hi)) {
        r.feasible = false;
        r.reason = "empty liability interval for Regime " + std::string(to_string(regime));
        return r;
    }
    auto eval = [&](int n) { return cost_breakdown(theta_optimal(regime, n, theta_lo, theta_hi, p), n, regime, p); };
    auto [n_best, cost] = enumerate_staffing(regime, p, opts, eval, r.n_first, r.n_last);
    r.feasible = true;
    r.best = {theta_optimal(regime, n_best, theta_lo, theta_hi, p), n_best, regime};
    r.cost = cost;
    r.theta_unconstrained = theta_unconstrained(regime, n_best, p);
    return r;
}

PlatformOptimum optimize_platform(const ModelParams& p, double theta_lo, double theta_hi, const SolverOptions& opts) {
    if (!(theta_lo >= 0.0 && theta_hi <= 1.0 && theta_lo <= theta_hi))
        throw std::invalid_argument("liability bounds must satisfy 0 <= lo <= hi <= 1");
    const double theta_d = threshold(p).theta_d;
    PlatformOptimum out;
    out.regime_a = optimize_regime(Mode::A, theta_lo, std::min(theta_hi, theta_d), p, opts);
    out.regime_i = optimize_regime(Mode::I, std::max(theta_lo, theta_d + opts.regime_epsilon), theta_hi, p, opts);
    if (!out.regime_a.feasible && !out.regime_i.feasible) {
        throw InfeasibleError("no feasible regime: Regime A needs theta <= " + std::to_string(theta_d) +
                              ", Regime I needs theta > " + std::to_string(theta_d) + " within [" +
                              std::to_string(theta_lo) + ", " + std::to_string(theta_hi) + "]");
    }
    if (!out.regime_a.feasible) {
        out.winner = Mode::I;
    } else if (!out.regime_i.feasible) {
        out.winner = Mode::A;
    } else {
        out.winner = out.regime_i.cost.total < out.regime_a.cost.total ? Mode::I : Mode::A;
    }
    return out;
}

CostBreakdown social_cost(int n, Mode m, const ModelParams& p) {
    CostBreakdown c;
    c.risk = p.lambda * p.big_l * mode_attrs(m, p).error_prob;
    c.congestion = congestion_cost(n, m, p);
    c.staffing = p.c_n * n;
    c.compliance = 0.0;
    c.total = c.risk + c.congestion + c.staffing;
    return c;
}

SocialOptimum optimize_social(const ModelParams& p, const SolverOptions& opts) {
    SocialOptimum best;
    best.cost.total = std::numeric_limits<double>::infinity();
    for (Mode m : {Mode::A, Mode::I}) {
        int first = 0, last = 0;
        auto [n, cost] = enumerate_staffing(m, p, opts, [&](int k) { return social_cost(k, m, p); }, first, last);
        if (cost.total < best.cost.total) {
            best.policy = {0.0, n, m};
            best.cost = cost;
        }
    }
    return best;
}

}  // namespace medliab
