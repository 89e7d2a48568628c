#pragma once

// M/M/N performance measures.

#include <stdexcept>

namespace medliab {

/// Configurations with utilization above 1 - kSaturationMargin are treated as unstable.
inline constexpr double kSaturationMargin = 1e-9;

class UnstableError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct QueueMetrics {
    double rho;         // utilization lambda / (n mu)
    double delay_prob;  // Erlang C
    double w_q;         // mean wait in queue (hours)
    double t_total;     // w_q + 1/mu
};

/// floor(lambda/mu) + 1, the smallest n with lambda < n mu.
[[nodiscard]] int min_staffing(double lambda, double mu);

/// True when n servers keep utilization at or below 1 - kSaturationMargin.
[[nodiscard]] bool is_stable(double lambda, double mu, int n) noexcept;

/// Smallest n that passes is_stable(); equals min_staffing() except at
/// near-integer offered loads.
[[nodiscard]] int first_stable_staffing(double lambda, double mu);

/// Probability an arrival waits, for n servers and offered load a = lambda/mu.
/// Uses the Erlang-B recurrence B_k = a B_{k-1} / (k + a B_{k-1}) and
/// C = B_n / (1 - rho (1 - B_n)), which never forms a^n or n!.
[[nodiscard]] double erlang_c(int n, double offered_load);

[[nodiscard]] QueueMetrics queue_metrics(double lambda, double mu, int n);

}  // namespace medliab
