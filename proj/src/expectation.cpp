#include "fedqq/expectation.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include "fedqq/beta_beta.hpp"
#include "fedqq/order_stat.hpp"
#include "fedqq/poisson_binomial.hpp"
#include "fedqq/quadrature.hpp"

namespace fedqq {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// Rows of Pascal's triangle up to row N.
std::vector<std::vector<cpp_int>> binomial_table(int N) {
    std::vector<std::vector<cpp_int>> c(N + 1);
    for (int i = 0; i <= N; ++i) {
        c[i].assign(i + 1, 1);
        for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
    }
    return c;
}

// Coefficients of the product of polynomials a and b (index = exponent).
std::vector<cpp_int> convolve(const std::vector<cpp_int>& a,
                              const std::vector<cpp_int>& b) {
    std::vector<cpp_int> out(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

}  // namespace

PairOrder::PairOrder(int ell_, int n_, int k_, int m_)
    : ell(ell_), n(n_), k(k_), m(m_) {
    if (n < 1 || ell < 1 || ell > n || m < 1 || k < 1 || k > m) {
        throw std::domain_error("PairOrder: requires 1<=ell<=n and 1<=k<=m");
    }
}

MultiOrder::MultiOrder(std::vector<int> ells_, std::vector<int> ns_, int k_)
    : ells(std::move(ells_)), ns(std::move(ns_)), k(k_) {
    if (ells.size() != ns.size() || ns.empty()) {
        throw std::domain_error("MultiOrder: ells and ns must match, nonempty");
    }
    const int m = agents();
    if (k < 1 || k > m) throw std::domain_error("MultiOrder: requires 1<=k<=m");
    for (int j = 0; j < m; ++j) {
        if (ns[j] < 1 || ells[j] < 1 || ells[j] > ns[j]) {
            throw std::domain_error("MultiOrder: requires 1<=ell_j<=n_j");
        }
    }
}

double m_lk_exact(const PairOrder& order) {
    const int ell = order.ell, n = order.n, k = order.k, m = order.m;
    if (m > 6 || n > 12) {
        throw CapacityError(
            "m_lk_exact: cap m<=6, n<=12 exceeded; use m_lk_quadrature");
    }
    const auto binom = binomial_table(m * n);

    // The nested sum factors as a power of the "high" binomial polynomial
    // (indices ell..n) times a power of the "low" one (indices 0..ell-1),
    // grouped by the total index sum.
    std::vector<cpp_int> high(n + 1, 0), low(ell, 0);
    for (int i = ell; i <= n; ++i) high[i] = binom[n][i];
    for (int i = 0; i < ell; ++i) low[i] = binom[n][i];

    std::vector<cpp_int> acc(1, 1);
    for (int rep = 0; rep < k - 1; ++rep) acc = convolve(acc, high);
    for (int rep = 0; rep < m - k; ++rep) acc = convolve(acc, low);

    cpp_rational sum = 0;
    for (size_t s = 0; s < acc.size(); ++s) {
        if (acc[s] == 0) continue;
        sum += cpp_rational(acc[s], binom[m * n][s + ell]);
    }
    const cpp_rational prefactor =
        cpp_rational(cpp_int(k) * binom[m][k] * ell * binom[n][ell],
                     cpp_int(m * n + 1));
    return static_cast<double>(prefactor * sum);
}

double m_lk_quadrature(const PairOrder& order, double tol) {
    const BetaBetaLaw law(order.ell, order.n, order.k, order.m);
    // Restrict to the central quantile range: the law concentrates sharply
    // at large (m, n), and the adaptive rule can miss a transition that
    // fits between sample points of the full unit interval.  The excluded
    // tails contribute at most eps each, folded in analytically.
    constexpr double eps = 1e-12;
    const double lo = beta_beta_quantile(law, eps);
    const double hi = beta_beta_quantile(law, 1.0 - eps);
    return lo + integrate([&](double t) { return 1.0 - beta_beta_cdf(law, t); },
                          lo, hi, tol);
}

std::pair<double, double> m_lk_bounds(const PairOrder& order) {
    const OrderStatLaw inner(order.ell, order.n);
    const double denom = order.m + 0.5;
    return {beta_quantile(inner, (order.k - 0.5) / denom),
            beta_quantile(inner, order.k / denom)};
}

double m_multi_exact(const MultiOrder& order) {
    const int m = order.agents();
    int N = 0;
    for (int j = 0; j < m; ++j) {
        if (order.ns[j] > 6) {
            throw CapacityError(
                "m_multi_exact: cap n_j<=6 exceeded; use m_multi_quadrature");
        }
        N += order.ns[j];
    }
    if (m > 4) {
        throw CapacityError(
            "m_multi_exact: cap m<=4 exceeded; use m_multi_quadrature");
    }
    const auto binom = binomial_table(N);

    // Sum over the subsets T (|T| >= k) of agents whose local quantile is
    // below the server threshold: each agent contributes the high or low
    // part of its binomial polynomial.
    cpp_rational total = 0;
    for (int mask = 0; mask < (1 << m); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) < order.k) continue;
        std::vector<cpp_int> acc(1, 1);
        for (int j = 0; j < m; ++j) {
            const int nj = order.ns[j], lj = order.ells[j];
            std::vector<cpp_int> part;
            if (mask & (1 << j)) {
                part.assign(nj + 1, 0);
                for (int i = lj; i <= nj; ++i) part[i] = binom[nj][i];
            } else {
                part.assign(lj, 0);
                for (int i = 0; i < lj; ++i) part[i] = binom[nj][i];
            }
            acc = convolve(acc, part);
        }
        for (size_t s = 0; s < acc.size(); ++s) {
            if (acc[s] == 0) continue;
            total += cpp_rational(acc[s], binom[N][s]);
        }
    }
    return static_cast<double>(1 - total / (N + 1));
}

double m_multi_quadrature(const MultiOrder& order, double tol) {
    const int m = order.agents();
    std::vector<OrderStatLaw> laws;
    laws.reserve(m);
    for (int j = 0; j < m; ++j) laws.emplace_back(order.ells[j], order.ns[j]);
    const auto law_cdf = [&](double t) {
        std::vector<double> probs(m);
        for (int j = 0; j < m; ++j) probs[j] = beta_cdf(laws[j], t);
        return 1.0 - PoissonBinomialLaw(probs).cdf(order.k - 1);
    };
    // Bracket the transition by quantiles so the adaptive rule cannot skip
    // over it; the excluded tails contribute at most eps each.
    constexpr double eps = 1e-12;
    const auto quantile = [&](double p) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (law_cdf(mid) < p) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double lo = quantile(eps);
    const double hi = quantile(1.0 - eps);
    // Survival of the coverage law: the k-th smallest message exceeds t
    // unless at least k messages fall below it.
    return lo + integrate([&](double t) { return 1.0 - law_cdf(t); }, lo, hi,
                          tol);
}

}  // namespace fedqq
