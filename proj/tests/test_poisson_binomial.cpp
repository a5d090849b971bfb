#include <cmath>
#include <vector>

#include "doctest.h"
#include "fedqq/poisson_binomial.hpp"

using namespace fedqq;

TEST_CASE("poisson binomial pmf reference values") {
    const PoissonBinomialLaw law({0.1, 0.35, 0.62, 0.9});
    // Hand-computed products, e.g. pmf(0) = 0.9 * 0.65 * 0.38 * 0.1.
    CHECK(law.pmf(0) == doctest::Approx(0.022230).epsilon(1e-10));
    CHECK(law.pmf(1) == doctest::Approx(0.250780).epsilon(1e-5));
    CHECK(law.pmf(2) == doctest::Approx(0.481280).epsilon(1e-5));
    CHECK(law.pmf(3) == doctest::Approx(0.226180).epsilon(1e-5));
    CHECK(law.pmf(4) == doctest::Approx(0.019530).epsilon(1e-10));
    CHECK(law.cdf(2) == doctest::Approx(0.754290).epsilon(1e-5));
}

TEST_CASE("poisson binomial pmf sums to one") {
    const PoissonBinomialLaw law({0.2, 0.5, 0.71, 0.04, 0.93, 0.6});
    double total = 0.0;
    for (int j = 0; j <= law.size(); ++j) total += law.pmf(j);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(law.cdf(-1) == 0.0);
    CHECK(law.cdf(law.size()) == 1.0);
    CHECK(law.cdf(99) == 1.0);
}

TEST_CASE("equal probabilities reduce to the binomial law") {
    const double p = 0.37;
    const int m = 9;
    const PoissonBinomialLaw law(std::vector<double>(m, p));
    double binom = 1.0;  // C(m, j) running value
    for (int j = 0; j <= m; ++j) {
        const double expected =
            binom * std::pow(p, j) * std::pow(1.0 - p, m - j);
        CHECK(law.pmf(j) == doctest::Approx(expected).epsilon(1e-12));
        binom = binom * (m - j) / (j + 1);
    }
}

TEST_CASE("degenerate probabilities shift the support") {
    const PoissonBinomialLaw law({1.0, 1.0, 0.0, 0.5});
    CHECK(law.pmf(0) == 0.0);
    CHECK(law.pmf(1) == 0.0);
    CHECK(law.pmf(2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(law.pmf(3) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(law.pmf(4) == 0.0);
}
