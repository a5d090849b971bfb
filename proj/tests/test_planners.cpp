#include <algorithm>

#include "doctest.h"
#include "fedqq/coverage.hpp"
#include "fedqq/expectation.hpp"
#include "fedqq/planners.hpp"

using namespace fedqq;

TEST_CASE("qqm on the 3x3 toy example keeps the global maximum") {
    const Plan p = plan_qqm(FederationShape(3, 3, 0.1, 0.2));
    REQUIRE_FALSE(p.trivial());
    CHECK(p.ells == std::vector<int>{3, 3, 3});
    CHECK(p.k == 3);
    CHECK(p.predicted->mean == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(p.guarantee == Guarantee::MARGINAL);
}

TEST_CASE("qqm declares infeasible shapes trivial") {
    const Plan p = plan_qqm(FederationShape(2, 4, 0.1, 0.2));
    CHECK(p.trivial());
    if (p.predicted.has_value()) CHECK(p.predicted->mean == 1.0);
}

TEST_CASE("qqc reproduces the reference (200, 20) orders") {
    const Plan p = plan_qqc(FederationShape(200, 20, 0.1, 0.2));
    REQUIRE_FALSE(p.trivial());
    CHECK(p.ells.front() == 18);
    CHECK(p.k == 142);
    CHECK(p.guarantee == Guarantee::TRAINING_CONDITIONAL);
    CHECK(p.predicted->mean == doctest::Approx(0.905237).epsilon(1e-5));
}

TEST_CASE("marginal planners meet the nominal mean") {
    for (const auto& [m, n] : {std::pair{5, 20}, {20, 5}, {50, 50}, {7, 13}}) {
        const FederationShape shape(m, n, 0.1, 0.2);
        for (const Plan& p : {plan_qqm(shape), plan_qqm_fast(shape)}) {
            if (p.trivial()) continue;
            CHECK(coverage_law(p).mean() >= 0.9 - 1e-8);
        }
    }
}

TEST_CASE("qqm picks the smallest feasible mean") {
    // Exhaustive check against the exact oracle on a small shape.
    const int m = 4, n = 6;
    const FederationShape shape(m, n, 0.1, 0.2);
    const Plan p = plan_qqm(shape);
    REQUIRE_FALSE(p.trivial());
    double best = 2.0;
    for (int ell = 1; ell <= n; ++ell) {
        for (int k = 1; k <= m; ++k) {
            const double M = m_lk_exact(PairOrder(ell, n, k, m));
            if (M >= 0.9 && M < best) best = M;
        }
    }
    CHECK(p.predicted->mean == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("conditional planners hold the beta quantile") {
    for (const auto& [m, n] : {std::pair{30, 20}, {100, 10}, {15, 40}}) {
        const FederationShape shape(m, n, 0.1, 0.2);
        for (const Plan& p : {plan_qqc(shape), plan_qqc_fast(shape)}) {
            if (p.trivial()) continue;
            CHECK(coverage_law(p).quantile(0.2) >= 0.9 - 1e-8);
        }
    }
}

TEST_CASE("fast planners are never less conservative than exact ones") {
    for (const auto& [m, n] : {std::pair{20, 20}, {60, 15}, {11, 33}}) {
        const FederationShape shape(m, n, 0.1, 0.2);
        const Plan exact = plan_qqm(shape), fast = plan_qqm_fast(shape);
        if (!exact.trivial() && !fast.trivial()) {
            CHECK(fast.predicted->mean >= exact.predicted->mean - 1e-9);
        }
        const Plan cexact = plan_qqc(shape), cfast = plan_qqc_fast(shape);
        if (!cexact.trivial() && !cfast.trivial()) {
            CHECK(coverage_law(cfast).quantile(0.8) >=
                  coverage_law(cexact).quantile(0.8) - 1e-9);
        }
    }
}

TEST_CASE("unequal-size planners clamp the local order when needed") {
    const FederationShape shape(3, {30, 2, 25}, 0.1, 0.2);
    const Plan p = plan_qqm_nj(shape);
    REQUIRE_FALSE(p.trivial());
    // Agent with n_j = 2 cannot hold ceil(0.9 * 3) = 3.
    CHECK(p.ells[1] == 2);
    CHECK(std::find(p.flags.begin(), p.flags.end(), "ell_clamped") !=
          p.flags.end());
    CHECK(coverage_law(p).mean() >= 0.9 - 1e-8);
}

TEST_CASE("qqc_nj holds the conditional guarantee on unequal sizes") {
    const FederationShape shape(25, {20, 30, 10, 40, 15, 20, 30, 10, 40, 15,
                                     20, 30, 10, 40, 15, 20, 30, 10, 40, 15,
                                     20, 30, 10, 40, 15},
                                0.1, 0.2);
    const Plan p = plan_qqc_nj(shape);
    REQUIRE_FALSE(p.trivial());
    CHECK(coverage_law(p).quantile(0.2) >= 0.9 - 1e-8);
}

TEST_CASE("central ranks follow the split conformal rule") {
    const Plan p = plan_central_marginal(99, 0.1);
    CHECK(p.r == 90);
    CHECK(p.predicted->mean == doctest::Approx(0.9).epsilon(1e-14));
    const Plan c = plan_central_conditional(99, 0.1, 0.2);
    CHECK(c.r > p.r);  // conditional certification costs rank
    CHECK(coverage_law(c).quantile(0.2) >= 0.9 - 1e-9);
}

TEST_CASE("fedcp-avg carries no guarantee") {
    const Plan p = plan(Method::FEDCP_AVG, FederationShape(5, 20, 0.1, 0.2));
    CHECK(p.guarantee == Guarantee::NONE);
    CHECK_FALSE(p.predicted.has_value());
    CHECK_THROWS(coverage_law(p));
}

TEST_CASE("dispatch pools sizes for central methods") {
    const Plan p = plan(Method::CENTRAL_M, FederationShape(20, 200, 0.1, 0.2));
    CHECK(p.ns == std::vector<int>{4000});
    CHECK(p.r == 3601);  // ceil(0.9 * 4001)
}
