#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace fedqq {

/// Orders of a quantile-of-quantiles estimator with equal agent sizes:
/// each of m agents reports its ell-th smallest of n scores, the server
/// keeps the k-th smallest of the m reports.
struct PairOrder {
    int ell;
    int n;
    int k;
    int m;

    PairOrder(int ell_, int n_, int k_, int m_);
};

/// Per-agent orders for the unequal-size setting.
struct MultiOrder {
    std::vector<int> ells;
    std::vector<int> ns;
    int k;

    MultiOrder(std::vector<int> ells_, std::vector<int> ns_, int k_);
    int agents() const { return static_cast<int>(ns.size()); }
};

/// Raised when an exact-oracle cap is exceeded; the quadrature path
/// handles those instances.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact expected coverage M_{ell,k} by the nested-sum formula, evaluated
/// in rational arithmetic. Test oracle; capped at m <= 6, n <= 12.
double m_lk_exact(const PairOrder& order);

/// M_{ell,k} = E[U_{(ell:n,k:m)}] by adaptive quadrature of the
/// Beta-Beta survival function.
double m_lk_quadrature(const PairOrder& order, double tol = 1e-10);

/// Strict bracketing of M_{ell,k} by Beta quantiles:
/// F^{-1}_{ell:n}((k-1/2)/(m+1/2)) < M < F^{-1}_{ell:n}(k/(m+1/2)).
std::pair<double, double> m_lk_bounds(const PairOrder& order);

/// Exact M_{ell_1..ell_m,k} by the permutation-sum formula in rational
/// arithmetic. Test oracle; capped at m <= 4, n_j <= 6.
double m_multi_exact(const MultiOrder& order);

/// M_{ell_1..ell_m,k} by quadrature of t -> 1 - PB(k-1; (F_{ell_j:n_j}(t))_j).
double m_multi_quadrature(const MultiOrder& order, double tol = 1e-10);

}  // namespace fedqq
