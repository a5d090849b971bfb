#include "fedqq/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedqq/coverage.hpp"
#include "fedqq/expectation.hpp"
#include "fedqq/order_stat.hpp"
#include "fedqq/poisson_binomial.hpp"

namespace fedqq {

namespace {

// Comparison slack for feasibility thresholds; M-value gaps on integer
// grids are orders of magnitude larger than quadrature error.
constexpr double kFeasEps = 1e-9;

// Ceiling with a guard against values sitting just above an integer
// from rounding (e.g. (1-alpha)*(n+1) with alpha = 0.1).
int ceil_tol(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }

Plan base_plan(Method method, const FederationShape& shape) {
    Plan p;
    p.method = method;
    p.m = shape.m;
    p.ns = shape.ns;
    p.alpha = shape.alpha;
    p.beta = shape.beta;
    return p;
}

Plan finish(Plan p, Guarantee g) {
    p.guarantee = g;
    p.predicted = predict_coverage(p, p.beta);
    return p;
}

Plan finish_trivial(Plan p) {
    p.guarantee = Guarantee::TRIVIAL;
    p.predicted = PredictedCoverage{1.0, 1.0, 1.0};
    return p;
}

struct Candidate {
    int ell = 0, k = 0;
    double value = std::numeric_limits<double>::infinity();
    bool found = false;

    void offer(int ell_, int k_, double value_) {
        const bool better =
            value_ < value - 1e-12 ||
            (std::fabs(value_ - value) <= 1e-12 &&
             (ell_ < ell || (ell_ == ell && k_ < k)));
        if (!found || better) {
            ell = ell_;
            k = k_;
            value = value_;
            found = true;
        }
    }
};

// Minimal k with M_{ell,k} >= 1-alpha, or 0 when none exists.
// Proposition 3.3's quantile bounds bracket the answer; quadrature is
// only needed for the boundary values they leave ambiguous.
int min_feasible_k_qqm(int ell, int n, int m, double alpha, double tol,
                       double* m_out) {
    const OrderStatLaw inner(ell, n);
    const double target = 1.0 - alpha;
    const auto lower_ok = [&](int k) {  // definitely feasible
        return beta_quantile(inner, (k - 0.5) / (m + 0.5)) >= target;
    };
    const auto upper_bad = [&](int k) {  // definitely infeasible
        return beta_quantile(inner, static_cast<double>(k) / (m + 0.5)) <= target;
    };

    // First k that is not certainly infeasible.
    int lo = 1, hi = m + 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (upper_bad(mid)) lo = mid + 1; else hi = mid;
    }
    const int k_first = lo;
    if (k_first > m) return 0;
    // First k that is certainly feasible.
    lo = k_first;
    hi = m + 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (lower_ok(mid)) hi = mid; else lo = mid + 1;
    }
    const int k_sure = lo;  // may be m+1

    for (int k = k_first; k <= std::min(k_sure, m); ++k) {
        const double M = m_lk_quadrature(PairOrder(ell, n, k, m), tol);
        if (M >= target - kFeasEps) {
            *m_out = M;
            return k;
        }
    }
    return 0;
}

}  // namespace

FederationShape::FederationShape(int m_, std::vector<int> ns_, double alpha_,
                                 double beta_)
    : m(m_), ns(std::move(ns_)), alpha(alpha_), beta(beta_) {
    if (m < 1 || static_cast<int>(ns.size()) != m) {
        throw std::domain_error("FederationShape: ns must have length m >= 1");
    }
    for (int n : ns) {
        if (n < 1) throw std::domain_error("FederationShape: all n_j >= 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
        throw std::domain_error("FederationShape: alpha, beta in (0,1)");
    }
}

FederationShape::FederationShape(int m_, int n_, double alpha_, double beta_)
    : FederationShape(m_, std::vector<int>(std::max(m_, 1), n_), alpha_,
                      beta_) {}

bool FederationShape::equal_sizes() const {
    return std::all_of(ns.begin(), ns.end(),
                       [&](int n) { return n == ns.front(); });
}

int FederationShape::common_n() const {
    if (!equal_sizes()) {
        throw std::domain_error("FederationShape: sizes differ");
    }
    return ns.front();
}

int FederationShape::total() const {
    int t = 0;
    for (int n : ns) t += n;
    return t;
}

Plan plan_qqm(const FederationShape& shape) {
    const int n = shape.common_n();
    const int m = shape.m;
    Plan p = base_plan(Method::QQM, shape);

    Candidate best;
    for (int ell = 1; ell <= n; ++ell) {
        double M = 0.0;
        const int k = min_feasible_k_qqm(ell, n, m, shape.alpha, 1e-10, &M);
        if (k > 0) best.offer(ell, k, M);
    }
    if (!best.found) return finish_trivial(p);
    p.ells.assign(m, best.ell);
    p.k = best.k;
    return finish(p, Guarantee::MARGINAL);
}

Plan plan_qqm_fast(const FederationShape& shape) {
    const int n = shape.common_n();
    const int m = shape.m;
    Plan p = base_plan(Method::QQM_FAST, shape);

    Candidate best;
    for (int ell = 1; ell <= n; ++ell) {
        const OrderStatLaw inner(ell, n);
        const double f = beta_cdf(inner, 1.0 - shape.alpha);
        const int k = ceil_tol((m + 0.5) * f + 0.5);
        if (k > m) continue;
        best.offer(ell, k, beta_quantile(inner, k / (m + 0.5)));
    }
    if (!best.found) return finish_trivial(p);
    p.ells.assign(m, best.ell);
    p.k = best.k;
    return finish(p, Guarantee::MARGINAL);
}

Plan plan_qqc(const FederationShape& shape) {
    const int n = shape.common_n();
    const int m = shape.m;
    const double target = 1.0 - shape.alpha;
    Plan p = base_plan(Method::QQC, shape);

    Candidate best;
    for (int ell = 1; ell <= n; ++ell) {
        const OrderStatLaw inner(ell, n);
        // Minimal k with F^-1_{(ell:n,k:m)}(beta) >= 1-alpha (increasing in k).
        int lo = 1, hi = m + 1;
        while (lo < hi) {
            const int mid = (lo + hi) / 2;
            const OrderStatLaw outer(mid, m);
            const double q =
                beta_quantile(inner, beta_quantile(outer, shape.beta));
            if (q >= target - kFeasEps) hi = mid; else lo = mid + 1;
        }
        if (lo > m) continue;
        const OrderStatLaw outer(lo, m);
        best.offer(ell, lo,
                   beta_quantile(inner, beta_quantile(outer, 1.0 - shape.beta)));
    }
    if (!best.found) return finish_trivial(p);
    p.ells.assign(m, best.ell);
    p.k = best.k;
    return finish(p, Guarantee::TRAINING_CONDITIONAL);
}

Plan plan_qqc_fast(const FederationShape& shape) {
    const int n = shape.common_n();
    const int m = shape.m;
    const double slack = std::sqrt(std::log(1.0 / shape.beta) / (2.0 * (m + 2)));
    Plan p = base_plan(Method::QQC_FAST, shape);

    Candidate best;
    for (int ell = 1; ell <= n; ++ell) {
        const OrderStatLaw inner(ell, n);
        const double f = beta_cdf(inner, 1.0 - shape.alpha);
        const int k = ceil_tol((m + 1.0) * (f + slack));
        if (k > m) continue;
        const OrderStatLaw outer(k, m);
        best.offer(ell, k,
                   beta_quantile(inner, beta_quantile(outer, 1.0 - shape.beta)));
    }
    if (!best.found) return finish_trivial(p);
    p.ells.assign(m, best.ell);
    p.k = best.k;
    return finish(p, Guarantee::TRAINING_CONDITIONAL);
}

namespace {

// Split-CP local orders ceil((1-alpha)(n_j+1)), clamped to n_j.
std::vector<int> split_cp_ells(const FederationShape& shape, Plan* p) {
    std::vector<int> ells(shape.m);
    bool clamped = false;
    for (int j = 0; j < shape.m; ++j) {
        int ell = ceil_tol((1.0 - shape.alpha) * (shape.ns[j] + 1));
        if (ell > shape.ns[j]) {
            ell = shape.ns[j];
            clamped = true;
        }
        ells[j] = ell;
    }
    if (clamped) p->flags.push_back("ell_clamped");
    return ells;
}

}  // namespace

Plan plan_qqm_nj(const FederationShape& shape) {
    Plan p = base_plan(Method::QQM_NJ, shape);
    const std::vector<int> ells = split_cp_ells(shape, &p);
    const double target = 1.0 - shape.alpha;

    // M is increasing in k; binary search the minimal feasible server order.
    const auto M_at = [&](int k) {
        return m_multi_quadrature(MultiOrder(ells, shape.ns, k), 1e-10);
    };
    if (M_at(shape.m) < target - kFeasEps) return finish_trivial(p);
    int lo = 1, hi = shape.m;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (M_at(mid) >= target - kFeasEps) hi = mid; else lo = mid + 1;
    }
    p.ells = ells;
    p.k = lo;
    return finish(p, Guarantee::MARGINAL);
}

Plan plan_qqc_nj(const FederationShape& shape) {
    Plan p = base_plan(Method::QQC_NJ, shape);
    const std::vector<int> ells = split_cp_ells(shape, &p);

    std::vector<double> probs(shape.m);
    for (int j = 0; j < shape.m; ++j) {
        probs[j] = beta_cdf(OrderStatLaw(ells[j], shape.ns[j]), 1.0 - shape.alpha);
    }
    const PoissonBinomialLaw pb(probs);
    // PB cdf is increasing in k, so the argmin over the feasible set is
    // its smallest element.
    int k = 0;
    for (int cand = 1; cand <= shape.m; ++cand) {
        if (pb.cdf(cand - 1) >= 1.0 - shape.beta - 1e-12) {
            k = cand;
            break;
        }
    }
    if (k == 0) return finish_trivial(p);
    p.ells = ells;
    p.k = k;
    return finish(p, Guarantee::TRAINING_CONDITIONAL);
}

Plan plan_central_marginal(int n_c, double alpha) {
    if (n_c < 1) throw std::domain_error("plan_central_marginal: n_c >= 1");
    Plan p;
    p.method = Method::CENTRAL_M;
    p.m = 1;
    p.ns = {n_c};
    p.alpha = alpha;
    const int r = ceil_tol((1.0 - alpha) * (n_c + 1));
    if (r > n_c) return finish_trivial(p);
    p.r = r;
    return finish(p, Guarantee::MARGINAL);
}

Plan plan_central_conditional(int n_c, double alpha, double beta) {
    if (n_c < 1) throw std::domain_error("plan_central_conditional: n_c >= 1");
    Plan p;
    p.method = Method::CENTRAL_C;
    p.m = 1;
    p.ns = {n_c};
    p.alpha = alpha;
    p.beta = beta;
    const double target = 1.0 - alpha;
    const auto ok = [&](int r) {
        return beta_quantile(OrderStatLaw(r, n_c), beta) >= target - kFeasEps;
    };
    if (!ok(n_c)) return finish_trivial(p);
    int lo = 1, hi = n_c;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (ok(mid)) hi = mid; else lo = mid + 1;
    }
    p.r = lo;
    return finish(p, Guarantee::TRAINING_CONDITIONAL);
}

Plan plan(Method method, const FederationShape& shape) {
    switch (method) {
        case Method::QQM: return plan_qqm(shape);
        case Method::QQM_FAST: return plan_qqm_fast(shape);
        case Method::QQC: return plan_qqc(shape);
        case Method::QQC_FAST: return plan_qqc_fast(shape);
        case Method::QQM_NJ: return plan_qqm_nj(shape);
        case Method::QQC_NJ: return plan_qqc_nj(shape);
        case Method::CENTRAL_M: {
            Plan p = plan_central_marginal(shape.total(), shape.alpha);
            p.beta = shape.beta;
            if (!p.trivial()) p.predicted = predict_coverage(p, p.beta);
            return p;
        }
        case Method::CENTRAL_C:
            return plan_central_conditional(shape.total(), shape.alpha,
                                            shape.beta);
        case Method::FEDCP_AVG: {
            // No guarantee to plan for; the orders are fixed by the rule.
            Plan p = base_plan(Method::FEDCP_AVG, shape);
            p.ells = split_cp_ells(shape, &p);
            p.guarantee = Guarantee::NONE;
            return p;
        }
    }
    throw std::logic_error("plan: unknown method");
}

}  // namespace fedqq
