#include <cmath>

#include "doctest.h"
#include "fedqq/quadrature.hpp"

using namespace fedqq;

TEST_CASE("polynomials integrate exactly") {
    CHECK(integrate([](double x) { return x * x * x * x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return 3.0 * x * x - 2.0 * x + 1.0; },
                    -1.0, 2.0) == doctest::Approx(9.0).epsilon(1e-13));
}

TEST_CASE("transcendental reference integrals") {
    const double pi = 3.14159265358979323846;
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, pi) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 5.0) ==
          doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-12));
}

TEST_CASE("adaptivity resolves a localized bump") {
    // A narrow Gaussian bump centered mid-interval; total mass known.
    const double s = 1e-3;
    const double val = integrate(
        [&](double x) {
            const double z = (x - 0.35) / s;
            return std::exp(-0.5 * z * z);
        },
        0.0, 1.0, 1e-12);
    CHECK(val == doctest::Approx(s * std::sqrt(2.0 * 3.14159265358979323846))
                     .epsilon(1e-9));
}

TEST_CASE("degenerate interval integrates to zero") {
    CHECK(integrate([](double x) { return x; }, 0.4, 0.4) == 0.0);
}
