#include "doctest.h"
#include "fedqq/beta_beta.hpp"
#include "fedqq/quadrature.hpp"

using namespace fedqq;

TEST_CASE("beta_beta cdf and quantile reference values") {
    // Law of the 3rd of 4 draws of Beta(2, 4) (= 2nd of 5 uniforms).
    const BetaBetaLaw law(2, 5, 3, 4);
    CHECK(beta_beta_cdf(law, 0.3) ==
          doctest::Approx(0.27140759702461041).epsilon(1e-10));
    CHECK(beta_beta_quantile(law, 0.6) ==
          doctest::Approx(0.40453597207457188).epsilon(1e-10));
}

TEST_CASE("beta_beta cdf is the composition of the two beta cdfs") {
    const BetaBetaLaw law(3, 8, 2, 6);
    for (const double t : {0.05, 0.3, 0.55, 0.8, 0.97}) {
        const double inner = beta_cdf(OrderStatLaw(3, 8), t);
        CHECK(beta_beta_cdf(law, t) ==
              doctest::Approx(beta_cdf(OrderStatLaw(2, 6), inner))
                  .epsilon(1e-13));
    }
}

TEST_CASE("beta_beta quantile roundtrip") {
    const BetaBetaLaw law(4, 9, 5, 7);
    for (const double p : {1e-5, 0.1, 0.5, 0.9, 1.0 - 1e-5}) {
        CHECK(beta_beta_cdf(law, beta_beta_quantile(law, p)) ==
              doctest::Approx(p).epsilon(1e-8));
    }
}

TEST_CASE("beta_beta quantile survives extreme tail probabilities") {
    // Intermediate probabilities can round to 0 or 1; the quantile must
    // stay finite and ordered instead of throwing.
    const BetaBetaLaw law(10000, 10000, 10000, 10000);
    const double lo = beta_beta_quantile(law, 1e-12);
    const double hi = beta_beta_quantile(law, 1.0 - 1e-12);
    CHECK(lo > 0.0);
    CHECK(lo <= hi);
    CHECK(hi <= 1.0);
}

TEST_CASE("beta_beta pdf integrates to the cdf increment") {
    const BetaBetaLaw law(2, 6, 3, 5);
    const double mass = integrate(
        [&](double t) { return beta_beta_pdf(law, t); }, 0.2, 0.7, 1e-11);
    CHECK(mass == doctest::Approx(beta_beta_cdf(law, 0.7) -
                                  beta_beta_cdf(law, 0.2))
                      .epsilon(1e-9));
}
