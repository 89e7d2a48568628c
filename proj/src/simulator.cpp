#include "medliab/simulator.hpp"

#include <cmath>
#include <deque>
#include <functional>
#include <queue>
#include <random>
#include <stdexcept>

#include "medliab/parallel.hpp"
#include "medliab/queueing.hpp"

namespace medliab {

namespace {

class Stream {
public:
    Stream(std::uint64_t seed, std::uint32_t id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), id};
        gen_.seed(seq);
    }

    // Uniform on [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 gen_;
};

enum StreamId : std::uint32_t { kArrivals = 1, kServices = 2, kErrors = 3 };

struct BatchStats {
    double mean = 0.0;
    double stderr_ = 0.0;
};

BatchStats batch_stats(const std::vector<double>& batch_means) {
    const auto b = static_cast<double>(batch_means.size());
    double sum = 0.0;
    for (double x : batch_means) sum += x;
    const double mean = sum / b;
    double ss = 0.0;
    for (double x : batch_means) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (b - 1.0) / b)};
}

}  // namespace

SimResult simulate(const SimConfig& cfg) {
    if (!(cfg.lambda > 0) || !(cfg.mu > 0) || cfg.n < 1) throw std::invalid_argument("simulation needs positive rates and n >= 1");
    if (!(cfg.error_prob >= 0.0 && cfg.error_prob <= 1.0)) throw std::invalid_argument("error_prob must lie in [0, 1]");
    if (!is_stable(cfg.lambda, cfg.mu, cfg.n)) throw UnstableError("simulation unstable: lambda >= n mu");
    const std::int64_t warmup = cfg.effective_warmup();
    if (warmup < 0 || cfg.customers <= warmup) throw std::invalid_argument("customers must exceed warmup");
    const std::int64_t batch_size = (cfg.customers - warmup) / kBatchCount;
    if (batch_size < 1)
        throw std::invalid_argument("too few customers after warmup for " + std::to_string(kBatchCount) + " batches");
    const std::int64_t end = warmup + batch_size * kBatchCount;  // first unmeasured customer

    Stream arrivals(cfg.seed, kArrivals), services(cfg.seed, kServices), errors(cfg.seed, kErrors);

    std::vector<double> wait_sum(kBatchCount, 0.0), system_sum(kBatchCount, 0.0), error_count(kBatchCount, 0.0);
    std::vector<double> busy_area_at(kBatchCount + 1, 0.0), time_at(kBatchCount + 1, 0.0);

    std::priority_queue<double, std::vector<double>, std::greater<>> departures;
    std::deque<std::pair<std::int64_t, double>> queue;  // (customer, arrival time)
    double now = 0.0;
    double busy_area = 0.0;
    double next_arrival = arrivals.exponential(cfg.lambda);
    std::int64_t next_id = 0;
    std::int64_t started = 0;

    auto advance = [&](double t) {
        busy_area += static_cast<double>(departures.size()) * (t - now);
        now = t;
    };
    auto start_service = [&](std::int64_t id, double arrived) {
        const double service = services.exponential(cfg.mu);
        departures.push(now + service);
        const bool erred = errors.uniform() < cfg.error_prob;
        ++started;
        if (id >= warmup && id < end) {
            const auto b = static_cast<std::size_t>((id - warmup) / batch_size);
            wait_sum[b] += now - arrived;
            system_sum[b] += now - arrived + service;
            error_count[b] += erred ? 1.0 : 0.0;
        }
    };

    // Runs until every measured customer has entered service and the arrival of
    // customer `end` (the closing time marker) has been seen.
    while (started < end || next_id <= end) {
        const bool arrival_next = departures.empty() || next_arrival <= departures.top();
        if (arrival_next) {
            advance(next_arrival);
            const std::int64_t id = next_id++;
            if (id >= warmup && id <= end && (id - warmup) % batch_size == 0) {
                const auto k = static_cast<std::size_t>((id - warmup) / batch_size);
                busy_area_at[k] = busy_area;
                time_at[k] = now;
            }
            if (static_cast<int>(departures.size()) < cfg.n) {
                start_service(id, now);
            } else {
                queue.emplace_back(id, now);
            }
            next_arrival = now + arrivals.exponential(cfg.lambda);
        } else {
            advance(departures.top());
            departures.pop();
            if (!queue.empty()) {
                const auto [id, arrived] = queue.front();
                queue.pop_front();
                start_service(id, arrived);
            }
        }
    }

    std::vector<double> waits(kBatchCount), systems(kBatchCount), rates(kBatchCount), utils(kBatchCount);
    for (int b = 0; b < kBatchCount; ++b) {
        const auto size = static_cast<double>(batch_size);
        waits[b] = wait_sum[b] / size;
        systems[b] = system_sum[b] / size;
        rates[b] = error_count[b] / size;
        utils[b] = (busy_area_at[b + 1] - busy_area_at[b]) / (cfg.n * (time_at[b + 1] - time_at[b]));
    }
    SimResult r;
    const auto w = batch_stats(waits);
    const auto s = batch_stats(systems);
    const auto e = batch_stats(rates);
    const auto u = batch_stats(utils);
    r.mean_wait = w.mean;
    r.wait_stderr = w.stderr_;
    r.mean_system_time = s.mean;
    r.system_time_stderr = s.stderr_;
    r.error_rate = e.mean;
    r.error_rate_stderr = e.stderr_;
    r.utilization = u.mean;
    r.utilization_stderr = u.stderr_;
    r.measured = batch_size * kBatchCount;
    r.batches = kBatchCount;
    return r;
}

PolicyEstimate simulate_policy(const Policy& pol, const ModelParams& p, std::int64_t customers, std::uint64_t seed) {
    if (!(pol.theta >= 0.0 && pol.theta <= 1.0)) throw std::invalid_argument("liability share must lie in [0, 1]");
    const auto attrs = mode_attrs(pol.mode, p);
    SimConfig cfg;
    cfg.lambda = p.lambda;
    cfg.mu = attrs.service_rate;
    cfg.n = pol.n;
    cfg.customers = customers;
    cfg.seed = seed;
    cfg.error_prob = attrs.error_prob;

    PolicyEstimate est;
    est.sim = simulate(cfg);
    const double risk_scale = p.lambda * (1.0 - pol.theta) * p.big_l;
    const double congestion_scale = p.lambda * p.c_w;
    est.cost.risk = risk_scale * est.sim.error_rate;
    est.cost.congestion = congestion_scale * est.sim.mean_system_time;
    est.cost.staffing = p.c_n * pol.n;
    est.cost.compliance = p.kappa * pol.theta * pol.theta * pol.n;
    est.cost.total = est.cost.risk + est.cost.congestion + est.cost.staffing + est.cost.compliance;
    est.risk_stderr = risk_scale * est.sim.error_rate_stderr;
    est.congestion_stderr = congestion_scale * est.sim.system_time_stderr;
    est.total_stderr = std::hypot(est.risk_stderr, est.congestion_stderr);
    return est;
}

std::vector<ValidationCheck> run_validation_suite(const ValidationOptions& opts) {
    struct Case {
        double lambda, mu;
        int n;
    };
    const Case cases[] = {{50.0, 12.0, 5}, {50.0, 6.0, 10}};
    std::vector<ValidationCheck> out;
    for (const auto& c : cases) {
        const auto analytic = queue_metrics(c.lambda, c.mu, c.n);
        const std::string tag = "lambda=" + std::to_string(static_cast<int>(c.lambda)) + " mu=" +
                                std::to_string(static_cast<int>(c.mu)) + " n=" + std::to_string(c.n);
        std::vector<SimResult> runs(static_cast<std::size_t>(opts.seeds));
        parallel_for(runs.size(), opts.jobs, [&](std::size_t i) {
            SimConfig cfg{c.lambda, c.mu, c.n, opts.customers, -1, opts.base_seed + i, 0.0};
            runs[i] = simulate(cfg);
        });
        const auto& first = runs.front();
        out.push_back({tag + " mean_wait", analytic.w_q, first.mean_wait, 3.0 * first.wait_stderr,
                       std::abs(first.mean_wait - analytic.w_q) <= 3.0 * first.wait_stderr});
        out.push_back({tag + " utilization", analytic.rho, first.utilization, 3.0 * first.utilization_stderr,
                       std::abs(first.utilization - analytic.rho) <= 3.0 * first.utilization_stderr});
        int covered = 0;
        for (const auto& r : runs) covered += std::abs(r.mean_wait - analytic.w_q) <= 3.0 * r.wait_stderr ? 1 : 0;
        const double coverage = static_cast<double>(covered) / static_cast<double>(runs.size());
        out.push_back({tag + " wait coverage", 0.94, coverage, 0.94, coverage >= 0.94});
    }
    return out;
}

}  // namespace medliab
