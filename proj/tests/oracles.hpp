#pragma once

// Test-only reference computations. Nothing here calls into the solver code
// paths it is used to check: Erlang C is summed term by term in long double,
// costs are rebuilt from their components, and optima come from exhaustive
// enumeration.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "medliab/params.hpp"

namespace medliab::oracle {

/// Erlang C by direct summation of a^k/k! terms.
inline double erlang_c_direct(int n, double offered_load) {
    const long double a = offered_load;
    const long double rho = a / n;
    long double sum = 0.0L;
    for (int k = 0; k < n; ++k) {
        long double fact = 1.0L;
        for (int j = 2; j <= k; ++j) fact *= j;
        sum += std::pow(a, static_cast<long double>(k)) / fact;
    }
    long double fact_n = 1.0L;
    for (int j = 2; j <= n; ++j) fact_n *= j;
    const long double top = std::pow(a, static_cast<long double>(n)) / fact_n / (1.0L - rho);
    return static_cast<double>(top / (sum + top));
}

inline double service_rate(Mode m, const ModelParams& p) { return m == Mode::A ? p.mu_a : p.mu_i; }
inline double error_prob(Mode m, const ModelParams& p) { return m == Mode::A ? 1.0 - p.q : 1.0 - p.h; }

inline double system_time(int n, Mode m, const ModelParams& p) {
    const double mu = service_rate(m, p);
    return erlang_c_direct(n, p.lambda / mu) / (n * mu - p.lambda) + 1.0 / mu;
}

inline double platform_total(double theta, int n, Mode m, const ModelParams& p) {
    return p.lambda * (1.0 - theta) * p.big_l * error_prob(m, p) + p.lambda * p.c_w * system_time(n, m, p) +
           p.c_n * n + p.kappa * theta * theta * n;
}

inline double social_total(int n, Mode m, const ModelParams& p) {
    return p.lambda * p.big_l * error_prob(m, p) + p.lambda * p.c_w * system_time(n, m, p) + p.c_n * n;
}

/// Physician choice by comparing utilities directly; ties go to A.
inline Mode argmax_mode(double theta, const ModelParams& p) {
    const double ua = p.w - p.k_a - theta * p.big_l * (1.0 - p.q);
    const double ui = p.w - p.k_i - theta * p.big_l * (1.0 - p.h);
    return ua >= ui ? Mode::A : Mode::I;
}

inline int smallest_stable(double lambda, double mu) {
    int n = 1;
    while (lambda / (n * mu) > 1.0 - 1e-9) ++n;
    return n;
}

struct GridOptimum {
    double theta = 0.0;
    int n = 0;
    Mode mode = Mode::A;
    double total = std::numeric_limits<double>::infinity();
};

/// Exhaustive platform optimum over a theta grid on [lo, hi], every stable n up to
/// `n_span` above the first stable level, and the mode each theta induces.
inline GridOptimum brute_force_platform(const ModelParams& p, int theta_points = 2001, double lo = 0.0,
                                        double hi = 1.0, int n_span = 150) {
    std::map<std::pair<int, int>, double> queue_cost;  // (mode, n) -> lambda c_w T
    auto congestion = [&](int n, Mode m) {
        const auto key = std::pair{static_cast<int>(m), n};
        auto it = queue_cost.find(key);
        if (it == queue_cost.end()) it = queue_cost.emplace(key, p.lambda * p.c_w * system_time(n, m, p)).first;
        return it->second;
    };
    GridOptimum best;
    for (int i = 0; i < theta_points; ++i) {
        const double theta = theta_points == 1 ? lo : lo + (hi - lo) * i / (theta_points - 1);
        const Mode m = argmax_mode(theta, p);
        const int first = smallest_stable(p.lambda, service_rate(m, p));
        for (int n = first; n <= first + n_span; ++n) {
            const double total = p.lambda * (1.0 - theta) * p.big_l * error_prob(m, p) + congestion(n, m) +
                                 p.c_n * n + p.kappa * theta * theta * n;
            if (total < best.total) best = {theta, n, m, total};
        }
    }
    return best;
}

/// Exhaustive social optimum over both modes and n up to `n_span` above the first stable level.
inline GridOptimum brute_force_social(const ModelParams& p, int n_span = 150) {
    GridOptimum best;
    for (Mode m : {Mode::A, Mode::I}) {
        const int first = smallest_stable(p.lambda, service_rate(m, p));
        for (int n = first; n <= first + n_span; ++n) {
            const double total = social_total(n, m, p);
            if (total < best.total) best = {0.0, n, m, total};
        }
    }
    return best;
}

/// Parameters drawn uniformly from the calibrated sweep ranges; structural values stay at baseline.
inline ModelParams random_params(std::mt19937_64& rng) {
    auto draw = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    ModelParams p;
    p.lambda = draw(25.0, 90.0);
    p.q = draw(0.80, 0.94);
    p.big_l = draw(800.0, 5000.0);
    p.c_w = draw(50.0, 200.0);
    p.c_n = draw(100.0, 350.0);
    p.kappa = draw(1000.0, 5000.0);
    return p;
}

}  // namespace medliab::oracle
