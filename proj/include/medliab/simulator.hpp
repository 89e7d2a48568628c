#pragma once

// Seeded discrete-event M/M/N simulator used to cross-check the analytic
// queueing layer and the risk/congestion parts of the platform cost.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "medliab/platform.hpp"

namespace medliab {

/// Recorded in run manifests; bump the suffix whenever the stream layout changes.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+seed_seq-streams/v1";
inline constexpr int kBatchCount = 20;

struct SimConfig {
    double lambda = 50.0;
    double mu = 12.0;
    int n = 5;
    std::int64_t customers = 200000;
    std::int64_t warmup = -1;  // negative: 10% of customers
    std::uint64_t seed = 1;
    double error_prob = 0.0;

    [[nodiscard]] std::int64_t effective_warmup() const noexcept { return warmup < 0 ? customers / 10 : warmup; }
};

/// Batch-means estimates over the customers after warmup.
struct SimResult {
    double mean_wait = 0.0;  // hours in queue
    double wait_stderr = 0.0;
    double mean_system_time = 0.0;  // wait + service
    double system_time_stderr = 0.0;
    double utilization = 0.0;
    double utilization_stderr = 0.0;
    double error_rate = 0.0;
    double error_rate_stderr = 0.0;
    std::int64_t measured = 0;  // customers inside the batches
    int batches = 0;

    friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// FIFO single queue with n servers, exponential interarrivals and services.
/// Arrivals, services and error draws use independent generator streams, so a fixed
/// config reproduces the same result bit for bit. Throws UnstableError for
/// lambda >= n mu and std::invalid_argument when fewer than kBatchCount customers
/// remain after warmup.
[[nodiscard]] SimResult simulate(const SimConfig& cfg);

struct PolicyEstimate {
    CostBreakdown cost;  // risk and congestion empirical; staffing and compliance exact
    double risk_stderr = 0.0;
    double congestion_stderr = 0.0;
    double total_stderr = 0.0;
    SimResult sim;
};

[[nodiscard]] PolicyEstimate simulate_policy(const Policy& pol, const ModelParams& p, std::int64_t customers,
                                             std::uint64_t seed);

/// One line of the simulate-vs-analytic validation table.
struct ValidationCheck {
    std::string name;
    double expected = 0.0;
    double observed = 0.0;
    double bound = 0.0;  // allowed |observed - expected|, or minimum coverage for coverage checks
    bool passed = false;
};

struct ValidationOptions {
    std::int64_t customers = 200000;
    int seeds = 50;
    std::uint64_t base_seed = 1;
    unsigned jobs = 1;
};

/// Mean wait and utilization against the analytic values at (50, 12, 5) and (50, 6, 10),
/// plus 3-stderr coverage of the analytic wait across `seeds` replications (must reach 94%).
[[nodiscard]] std::vector<ValidationCheck> run_validation_suite(const ValidationOptions& opts = {});

}  // namespace medliab
