#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fedqq/plan.hpp"

namespace fedqq {

/// Exact distribution of the random coverage 1-alpha(D) of a plan under
/// continuous scores: Beta for central ranks, Beta-Beta for equal-size
/// QQ orders, a Poisson-Binomial composition for unequal sizes, and a
/// point mass at 1 for TRIVIAL plans.
class CoverageLaw {
  public:
    enum class Kind { BETA, BETA_BETA, PB_COMPOSED, DEGENERATE_ONE };

    double cdf(double t) const;
    double quantile(double p) const;
    double mean() const;
    double stddev() const;
    Kind kind() const { return kind_; }

    friend CoverageLaw coverage_law(const Plan& plan);

  private:
    CoverageLaw() = default;
    Kind kind_ = Kind::DEGENERATE_ONE;
    // BETA: (r, N); BETA_BETA: (ell, n, k, m); PB_COMPOSED: (ells, ns, k).
    int r_ = 0, N_ = 0;
    int ell_ = 0, n_ = 0, k_ = 0, m_ = 0;
    std::vector<int> ells_, ns_;
};

CoverageLaw coverage_law(const Plan& plan);

/// Mean and the (beta, 1-beta) coverage quantiles of a plan's law.
PredictedCoverage predict_coverage(const Plan& plan, double beta);

/// (quantile(beta), quantile(1-beta')): the coverage lies inside with
/// probability exactly 1-beta-beta' under continuous scores.
std::pair<double, double> fluctuation_interval(const Plan& plan, double beta,
                                               double beta_prime);

/// 1 - alpha + C/((2m+1) sqrt(n+2)) with C=27; valid for m >= 18 and n
/// large enough. in_hypotheses reports whether m >= 18.
double marginal_upper_bound(int m, int n, double alpha,
                            bool* in_hypotheses = nullptr);

/// 1 - alpha + Delta(beta)/sqrt((m+2)(n+2)),
/// Delta(beta) = 12 max{2 sqrt(log(1/beta)), 1}.
double conditional_upper_bound(int m, int n, double alpha, double beta,
                               bool* in_hypotheses = nullptr);

/// One grid cell's coverage gaps for one method. A TRIVIAL cell carries
/// the flag and no deltas.
struct SweepRecord {
    Method method;
    int m = 0;
    int n = 0;
    double delta_E = 0.0;
    double delta_q_beta = 0.0;
    double delta_q_1mbeta = 0.0;
    bool trivial = false;
};

std::vector<SweepRecord> sweep(const std::vector<Method>& methods,
                               const std::vector<std::pair<int, int>>& grid,
                               double alpha, double beta);

std::string sweep_csv(const std::vector<SweepRecord>& records);

/// The paper's 9x9 study grid {floor(10^(i/3)) : i in 1..9}.
std::vector<int> default_sweep_axis();

}  // namespace fedqq
