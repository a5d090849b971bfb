#pragma once

#include "fedqq/order_stat.hpp"

namespace fedqq {

/// Law of the k-th order statistic of m i.i.d. Beta(ell, n-ell+1) draws.
/// Its cdf is the composition F_{k:m} o F_{ell:n}.
struct BetaBetaLaw {
    OrderStatLaw inner;  // (ell, n)
    OrderStatLaw outer;  // (k, m)

    BetaBetaLaw(int ell, int n, int k, int m)
        : inner(ell, n), outer(k, m) {}
};

double beta_beta_cdf(const BetaBetaLaw& law, double t);
double beta_beta_quantile(const BetaBetaLaw& law, double p);
double beta_beta_pdf(const BetaBetaLaw& law, double t);

}  // namespace fedqq
