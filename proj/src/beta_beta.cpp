#include "fedqq/beta_beta.hpp"

#include <algorithm>
#include <limits>

namespace fedqq {

double beta_beta_cdf(const BetaBetaLaw& law, double t) {
    return beta_cdf(law.outer, beta_cdf(law.inner, t));
}

double beta_beta_quantile(const BetaBetaLaw& law, double p) {
    // The outer quantile can round to exactly 0 or 1 in double precision
    // for extreme p and orders; clamp into the open interval so the inner
    // quantile stays well defined.
    double q = beta_quantile(law.outer, p);
    q = std::min(std::max(q, std::numeric_limits<double>::min()),
                 1.0 - std::numeric_limits<double>::epsilon() / 2);
    return beta_quantile(law.inner, q);
}

double beta_beta_pdf(const BetaBetaLaw& law, double t) {
    return beta_pdf(law.outer, beta_cdf(law.inner, t)) * beta_pdf(law.inner, t);
}

}  // namespace fedqq
