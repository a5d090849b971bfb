#include <cmath>
#include <vector>

#include "doctest.h"
#include "fedqq/rate_fit.hpp"

using namespace fedqq;

namespace {

std::vector<SweepRecord> power_law_records(double c, double g, double d) {
    std::vector<SweepRecord> out;
    for (const int m : {2, 5, 10, 30, 100}) {
        for (const int n : {3, 8, 20, 60}) {
            SweepRecord r;
            r.method = Method::QQM;
            r.m = m;
            r.n = n;
            r.delta_E = c * std::pow(m, -g) * std::pow(n, -d);
            r.delta_q_beta = -r.delta_E;  // sign must not matter
            r.delta_q_1mbeta = r.delta_E;
            out.push_back(r);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("noise-free power law is recovered exactly") {
    const auto records = power_law_records(0.7, 1.25, 0.5);
    const RateFit f = fit_rates(records, SweepQuantity::DELTA_E);
    CHECK(f.c == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(f.gamma == doctest::Approx(1.25).epsilon(1e-8));
    CHECK(f.delta == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(f.loss == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("negative quantities fit their magnitude") {
    const auto records = power_law_records(0.7, 1.25, 0.5);
    const RateFit f = fit_rates(records, SweepQuantity::DELTA_Q_BETA);
    CHECK(f.gamma == doctest::Approx(1.25).epsilon(1e-8));
    CHECK(f.delta == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("huber weighting shrugs off a gross outlier") {
    auto records = power_law_records(0.5, 1.0, 1.0);
    records[7].delta_E *= 1e4;  // one wildly corrupted cell
    const RateFit f = fit_rates(records, SweepQuantity::DELTA_E, 0.1);
    CHECK(f.gamma == doctest::Approx(1.0).epsilon(0.02));
    CHECK(f.delta == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("trivial and zero records are skipped") {
    auto records = power_law_records(0.5, 1.0, 1.0);
    records[0].trivial = true;
    records[1].delta_E = 0.0;
    const RateFit f = fit_rates(records, SweepQuantity::DELTA_E);
    CHECK(f.gamma == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("degenerate designs are rejected") {
    const auto all = power_law_records(1.0, 1.0, 1.0);
    const std::vector<SweepRecord> few(all.begin(), all.begin() + 4);
    CHECK_THROWS(fit_rates(few, SweepQuantity::DELTA_E));

    std::vector<SweepRecord> fixed;
    for (int i = 0; i < 8; ++i) {
        SweepRecord r;
        r.method = Method::QQM;
        r.m = 10;
        r.n = 10;
        r.delta_E = 0.1;
        fixed.push_back(r);
    }
    CHECK_THROWS(fit_rates(fixed, SweepQuantity::DELTA_E));
}

TEST_CASE("fit serializes to json") {
    const RateFit f = fit_rates(power_law_records(2.0, 0.5, 0.25),
                                SweepQuantity::DELTA_E);
    const std::string j = f.to_json();
    CHECK(j.find("\"gamma\": 0.5") != std::string::npos);
    CHECK(j.find("\"delta\": 0.25") != std::string::npos);
}
