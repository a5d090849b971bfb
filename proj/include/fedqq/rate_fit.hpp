#pragma once

#include "fedqq/coverage.hpp"

namespace fedqq {

enum class SweepQuantity { DELTA_E, DELTA_Q_BETA, DELTA_Q_1MBETA };

/// Parameters of the log-linear rate model y ~ c * m^-gamma * n^-delta.
struct RateFit {
    double c;
    double gamma;
    double delta;
    double loss;  // achieved Huber objective on log residuals

    std::string to_json() const;
};

/// Robust fit of log y = log c - gamma log m - delta log n by Huber-loss
/// IRLS (threshold on log residuals; convergence when the parameter step
/// drops below 1e-10). y is the magnitude |quantity|; zero-valued and
/// TRIVIAL records are skipped. Requires at least 6 usable records and a
/// non-degenerate (m,n) design.
RateFit fit_rates(const std::vector<SweepRecord>& records,
                  SweepQuantity quantity, double huber_threshold = 1.0);

}  // namespace fedqq
