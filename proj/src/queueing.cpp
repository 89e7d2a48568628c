#include "medliab/queueing.hpp"

#include <cmath>
#include <string>

namespace medliab {

namespace {

void require_rates(double lambda, double mu) {
    if (!(lambda > 0) || !std::isfinite(lambda)) throw std::invalid_argument("arrival rate must be positive");
    if (!(mu > 0) || !std::isfinite(mu)) throw std::invalid_argument("service rate must be positive");
}

}  // namespace

int min_staffing(double lambda, double mu) {
    require_rates(lambda, mu);
    const double load = std::floor(lambda / mu);
    if (load >= 1e9) throw std::domain_error("offered load too large");
    return static_cast<int>(load) + 1;
}

bool is_stable(double lambda, double mu, int n) noexcept {
    if (n < 1) return false;
    return lambda / (static_cast<double>(n) * mu) <= 1.0 - kSaturationMargin;
}

int first_stable_staffing(double lambda, double mu) {
    int n = min_staffing(lambda, mu);
    while (!is_stable(lambda, mu, n)) ++n;
    return n;
}

double erlang_c(int n, double offered_load) {
    if (n < 1) throw std::invalid_argument("server count must be at least 1");
    if (!(offered_load >= 0) || !std::isfinite(offered_load))
        throw std::invalid_argument("offered load must be nonnegative");
    const double rho = offered_load / n;
    if (rho > 1.0 - kSaturationMargin) {
        throw UnstableError("system unstable: offered load " + std::to_string(offered_load) +
                            " with " + std::to_string(n) + " servers");
    }
    if (offered_load == 0.0) return 0.0;
    double b = 1.0;
    for (int k = 1; k <= n; ++k) b = offered_load * b / (k + offered_load * b);
    return b / (1.0 - rho * (1.0 - b));
}

QueueMetrics queue_metrics(double lambda, double mu, int n) {
    require_rates(lambda, mu);
    if (!is_stable(lambda, mu, n)) {
        throw UnstableError("system unstable: lambda=" + std::to_string(lambda) + " needs at least " +
                            std::to_string(first_stable_staffing(lambda, mu)) + " servers at mu=" +
                            std::to_string(mu) + ", got " + std::to_string(n));
    }
    QueueMetrics m{};
    m.rho = lambda / (n * mu);
    m.delay_prob = erlang_c(n, lambda / mu);
    m.w_q = m.delay_prob / (n * mu - lambda);
    m.t_total = m.w_q + 1.0 / mu;
    return m;
}

}  // namespace medliab
