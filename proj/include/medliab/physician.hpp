#pragma once

// Physician side of the game: per-mode utility, the indifference threshold
// and the threshold best response.

#include "medliab/params.hpp"

namespace medliab {

/// Indifference liability share and its closed-form partial derivatives.
struct ThresholdReport {
    double theta_d;     // (k_i - k_a) / (L (h - q)); may exceed 1
    double d_dq;        // > 0
    double d_dh;        // < 0
    double d_dl;        // < 0
    double d_ddelta_k;  // > 0, derivative w.r.t. k_i - k_a
};

/// w - k_m - theta L P_m. Throws std::invalid_argument for theta outside [0, 1].
[[nodiscard]] double physician_utility(Mode m, double theta, const ModelParams& p);

[[nodiscard]] ThresholdReport threshold(const ModelParams& p);

/// Mode A when theta <= theta_d (ties go to A), otherwise Mode I.
[[nodiscard]] Mode best_response(double theta, const ModelParams& p);

}  // namespace medliab
