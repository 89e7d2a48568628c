#include "medliab/physician.hpp"

#include <stdexcept>
#include <string>

namespace medliab {

namespace {

void require_share(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("liability share must lie in [0, 1], got " + std::to_string(theta));
}

}  // namespace

double physician_utility(Mode m, double theta, const ModelParams& p) {
    require_share(theta);
    const auto attrs = mode_attrs(m, p);
    return p.w - attrs.disutility - theta * p.big_l * attrs.error_prob;
}

ThresholdReport threshold(const ModelParams& p) {
    const double delta_k = p.k_i - p.k_a;
    const double gap = p.h - p.q;
    const double theta_d = delta_k / (p.big_l * gap);
    return {
        .theta_d = theta_d,
        .d_dq = delta_k / (p.big_l * gap * gap),
        .d_dh = -delta_k / (p.big_l * gap * gap),
        .d_dl = -theta_d / p.big_l,
        .d_ddelta_k = 1.0 / (p.big_l * gap),
    };
}

Mode best_response(double theta, const ModelParams& p) {
    require_share(theta);
    return theta <= threshold(p).theta_d ? Mode::A : Mode::I;
}

}  // namespace medliab
