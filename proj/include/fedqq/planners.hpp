#pragma once

#include "fedqq/plan.hpp"

namespace fedqq {

// Marginal planners (equal agent sizes).
Plan plan_qqm(const FederationShape& shape);
Plan plan_qqm_fast(const FederationShape& shape);

// Training-conditional planners (equal agent sizes).
Plan plan_qqc(const FederationShape& shape);
Plan plan_qqc_fast(const FederationShape& shape);

// Unequal-size planners with the split-CP local order rule.
Plan plan_qqm_nj(const FederationShape& shape);
Plan plan_qqc_nj(const FederationShape& shape);

// Centralized split-CP baselines on n_c pooled calibration points.
Plan plan_central_marginal(int n_c, double alpha);
Plan plan_central_conditional(int n_c, double alpha, double beta);

/// Dispatch by method on a shape (central methods pool the shape's total).
Plan plan(Method method, const FederationShape& shape);

}  // namespace fedqq
