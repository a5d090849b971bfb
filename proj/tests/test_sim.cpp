#include <cmath>
#include <set>

#include "doctest.h"
#include "fedqq/coverage.hpp"
#include "fedqq/planners.hpp"
#include "fedqq/sim.hpp"

using namespace fedqq;

TEST_CASE("qq protocol keeps the k-th smallest local quantile") {
    FederationShape shape(3, 4, 0.1, 0.2);
    Plan p;
    p.method = Method::QQM;
    p.m = 3;
    p.ns = {4, 4, 4};
    p.ells = {3, 3, 3};
    p.k = 2;
    p.guarantee = Guarantee::MARGINAL;
    ScoreMatrix scores;
    scores.scores = {{0.9, 0.1, 0.4, 0.2},    // 3rd smallest: 0.4
                     {0.8, 0.7, 0.05, 0.3},   // 3rd smallest: 0.7
                     {0.6, 0.55, 0.35, 0.2}}; // 3rd smallest: 0.55
    const SimResult res = run_qq_protocol(shape, scores, p);
    CHECK(res.trace.messages == std::vector<double>{0.4, 0.7, 0.55});
    CHECK(res.threshold == 0.55);  // 2nd smallest message
}

TEST_CASE("central protocol keeps the r-th pooled score") {
    Plan p = plan_central_marginal(9, 0.2);
    CHECK(p.r == 8);
    const std::vector<double> pooled = {0.5, 0.1, 0.9, 0.3, 0.2,
                                        0.8, 0.4, 0.6, 0.7};
    const SimResult res = run_central(pooled, p);
    CHECK(res.threshold == 0.8);
}

TEST_CASE("uniform model makes conditional coverage the threshold") {
    const ScoreModel model = ScoreModel::uniform();
    FederationShape shape(2, 3, 0.1, 0.2);
    Plan p;
    p.method = Method::QQM;
    p.m = 2;
    p.ns = {3, 3};
    p.ells = {3, 3};
    p.k = 2;
    p.guarantee = Guarantee::MARGINAL;
    const ScoreMatrix scores = draw_scores(shape, model, 7, 0);
    const SimResult res = run_qq_protocol(shape, scores, p, &model);
    CHECK(res.cond_coverage == doctest::Approx(res.threshold).epsilon(1e-15));
}

TEST_CASE("replication is deterministic in the master seed") {
    const FederationShape shape(5, 10, 0.1, 0.2);
    const Plan p = plan_qqm(shape);
    const ScoreModel model = ScoreModel::uniform();
    const ReplicateSummary a = replicate(shape, model, p, 200, 42);
    const ReplicateSummary b = replicate(shape, model, p, 200, 42);
    const ReplicateSummary c = replicate(shape, model, p, 200, 43);
    CHECK(a.coverages == b.coverages);
    CHECK(a.coverages != c.coverages);
}

TEST_CASE("stream seeds separate replications and agents") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        for (std::uint64_t agent = 0; agent < 20; ++agent) {
            seen.insert(stream_seed(123, rep, agent));
        }
    }
    CHECK(seen.size() == 400);
}

TEST_CASE("replicated mean matches the coverage law") {
    const FederationShape shape(10, 15, 0.1, 0.2);
    const Plan p = plan_qqm(shape);
    REQUIRE_FALSE(p.trivial());
    const int R = 20000;
    const ReplicateSummary s =
        replicate(shape, ScoreModel::uniform(), p, R, 7);
    const double M = coverage_law(p).mean();
    CHECK(std::fabs(s.mean - M) <= 4.0 * s.stddev / std::sqrt(double(R)));
}

TEST_CASE("score models expose the documented cdfs") {
    CHECK(ScoreModel::exponential(2.0).cdf(0.5) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    const ScoreModel bern = ScoreModel::bernoulli(0.3);
    CHECK(bern.cdf(0.0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(bern.cdf(0.999) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(bern.cdf(1.0) == 1.0);
    const ScoreModel gauss = ScoreModel::gaussian_residual(2.0);
    CHECK(gauss.cdf(2.0) == doctest::Approx(0.682689492137).epsilon(1e-9));
}

TEST_CASE("score model json parsing") {
    const ScoreModel m =
        ScoreModel::from_json("{\"kind\": \"exponential\", \"lambda\": 3.5}");
    CHECK(m.kind == ScoreModelKind::EXPONENTIAL);
    CHECK(m.lambda == 3.5);
    CHECK_THROWS(ScoreModel::from_json("{\"kind\": \"cauchy\"}"));
}

TEST_CASE("averaged-quantile closed forms") {
    // Independently derived reference values.
    const FederationShape ushape(4, 7, 0.1, 0.2);
    CHECK(avg_analytic_coverage(ScoreModel::uniform(), ushape,
                                std::vector<int>(4, 5)) ==
          doctest::Approx(5.0 / 8.0).epsilon(1e-12));
    const FederationShape eshape(3, 5, 0.1, 0.2);
    CHECK(avg_analytic_coverage(ScoreModel::exponential(1.0), eshape,
                                std::vector<int>(3, 4)) ==
          doctest::Approx(0.7024810245152746).epsilon(1e-12));
    const FederationShape bshape(2, 4, 0.1, 0.2);
    CHECK(avg_analytic_coverage(ScoreModel::bernoulli(0.3), bshape,
                                std::vector<int>(2, 3)) ==
          doctest::Approx(0.736393867).epsilon(1e-8));
}

TEST_CASE("empirical coverage is the fraction below threshold") {
    CHECK(empirical_coverage(0.5, {0.1, 0.4, 0.5, 0.9}) == 0.75);
}

TEST_CASE("sim csv header") {
    SimResult r;
    r.threshold = 0.5;
    const std::string csv = sim_csv({r});
    CHECK(csv.rfind("replication,threshold,cond_coverage,emp_coverage,length",
                    0) == 0);
}
