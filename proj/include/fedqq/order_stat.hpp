#pragma once

#include <utility>

namespace fedqq {

/// Law of the r-th order statistic of N i.i.d. standard uniforms,
/// i.e. the Beta(r, N-r+1) distribution with integer parameters.
struct OrderStatLaw {
    int r;  // order index, 1-based
    int N;  // sample size

    OrderStatLaw(int r_, int N_);
};

/// Regularized incomplete Beta I_t(r, N-r+1); relative error <= 1e-12.
double beta_cdf(const OrderStatLaw& law, double t);

/// Beta(r, N-r+1) density at t.
double beta_pdf(const OrderStatLaw& law, double t);

/// Inverse of beta_cdf on (0,1); |beta_cdf(result) - p| <= 1e-12.
double beta_quantile(const OrderStatLaw& law, double p);

/// Sub-Gaussian sandwich around the Beta quantiles:
/// (r/(N+1) - sqrt(log(1/delta)/(2(N+2))), r/(N+1) + sqrt(...)).
/// lower <= quantile(delta) and quantile(1-delta) <= upper.
std::pair<double, double> beta_quantile_bounds(const OrderStatLaw& law, double delta);

}  // namespace fedqq
