#include "fedqq/coverage.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fedqq/beta_beta.hpp"
#include "fedqq/order_stat.hpp"
#include "fedqq/planners.hpp"
#include "fedqq/poisson_binomial.hpp"
#include "fedqq/quadrature.hpp"

namespace fedqq {

namespace {

constexpr double kMomentTol = 1e-9;

// Mass outside [quantile(eps), quantile(1-eps)] contributes at most eps to
// the survival-function moments, so it is folded in analytically.  At large
// (m, n) the law concentrates on an interval of width ~1e-5 and handing the
// full unit interval to the adaptive rule risks the transition slipping
// between sample points.
constexpr double kTailEps = 1e-12;

}  // namespace

double CoverageLaw::cdf(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    switch (kind_) {
        case Kind::BETA:
            return beta_cdf(OrderStatLaw(r_, N_), t);
        case Kind::BETA_BETA:
            return beta_beta_cdf(BetaBetaLaw(ell_, n_, k_, m_), t);
        case Kind::PB_COMPOSED: {
            std::vector<double> probs(ells_.size());
            for (size_t j = 0; j < ells_.size(); ++j) {
                probs[j] = beta_cdf(OrderStatLaw(ells_[j], ns_[j]), t);
            }
            return 1.0 - PoissonBinomialLaw(probs).cdf(k_ - 1);
        }
        case Kind::DEGENERATE_ONE:
            return 0.0;  // all mass at 1, t < 1 here
    }
    throw std::logic_error("CoverageLaw::cdf: unknown kind");
}

double CoverageLaw::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("CoverageLaw::quantile: p in [0,1]");
    }
    switch (kind_) {
        case Kind::BETA:
            return beta_quantile(OrderStatLaw(r_, N_), p);
        case Kind::BETA_BETA:
            return beta_beta_quantile(BetaBetaLaw(ell_, n_, k_, m_), p);
        case Kind::PB_COMPOSED: {
            // cdf is continuous and increasing in t; bisection suffices.
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (cdf(mid) < p) lo = mid; else hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        case Kind::DEGENERATE_ONE:
            return 1.0;
    }
    throw std::logic_error("CoverageLaw::quantile: unknown kind");
}

double CoverageLaw::mean() const {
    switch (kind_) {
        case Kind::BETA:
            return static_cast<double>(r_) / (N_ + 1);
        case Kind::DEGENERATE_ONE:
            return 1.0;
        default: {
            const double lo = quantile(kTailEps);
            const double hi = quantile(1.0 - kTailEps);
            // 1 - F >= 1 - eps below lo, <= eps above hi.
            return lo + integrate([this](double t) { return 1.0 - cdf(t); },
                                  lo, hi, kMomentTol);
        }
    }
}

double CoverageLaw::stddev() const {
    switch (kind_) {
        case Kind::BETA: {
            const double N1 = N_ + 1.0;
            return std::sqrt(r_ * (N1 - r_) / (N1 * N1 * (N1 + 1.0)));
        }
        case Kind::DEGENERATE_ONE:
            return 0.0;
        default: {
            const double mu = mean();
            // E[X^2] = 2 int_0^1 t (1 - F(t)) dt on [0,1]-supported laws,
            // with the near-certain stretch below quantile(eps) folded in
            // analytically as lo^2.
            const double lo = quantile(kTailEps);
            const double hi = quantile(1.0 - kTailEps);
            const double ex2 =
                lo * lo +
                2.0 * integrate([this](double t) { return t * (1.0 - cdf(t)); },
                                lo, hi, kMomentTol);
            return std::sqrt(std::max(ex2 - mu * mu, 0.0));
        }
    }
}

CoverageLaw coverage_law(const Plan& plan) {
    CoverageLaw law;
    if (plan.trivial()) {
        law.kind_ = CoverageLaw::Kind::DEGENERATE_ONE;
        return law;
    }
    if (plan.method == Method::FEDCP_AVG) {
        throw std::domain_error(
            "coverage_law: no exact law for averaged quantiles");
    }
    if (plan.central()) {
        law.kind_ = CoverageLaw::Kind::BETA;
        law.r_ = plan.r;
        law.N_ = plan.ns.at(0);
        return law;
    }
    if (plan.uniform_orders()) {
        law.kind_ = CoverageLaw::Kind::BETA_BETA;
        law.ell_ = plan.ells.at(0);
        law.n_ = plan.ns.at(0);
        law.k_ = plan.k;
        law.m_ = plan.m;
        return law;
    }
    law.kind_ = CoverageLaw::Kind::PB_COMPOSED;
    law.ells_ = plan.ells;
    law.ns_ = plan.ns;
    law.k_ = plan.k;
    return law;
}

PredictedCoverage predict_coverage(const Plan& plan, double beta) {
    const CoverageLaw law = coverage_law(plan);
    return PredictedCoverage{law.mean(), law.quantile(beta),
                             law.quantile(1.0 - beta)};
}

std::pair<double, double> fluctuation_interval(const Plan& plan, double beta,
                                               double beta_prime) {
    if (!(beta >= 0.0 && beta_prime >= 0.0 && beta + beta_prime <= 1.0)) {
        throw std::domain_error(
            "fluctuation_interval: need beta, beta' >= 0, beta + beta' <= 1");
    }
    const CoverageLaw law = coverage_law(plan);
    return {law.quantile(beta), law.quantile(1.0 - beta_prime)};
}

double marginal_upper_bound(int m, int n, double alpha, bool* in_hypotheses) {
    if (m < 1 || n < 1) throw std::domain_error("marginal_upper_bound");
    if (in_hypotheses) *in_hypotheses = m >= 18;
    return 1.0 - alpha + 27.0 / ((2.0 * m + 1.0) * std::sqrt(n + 2.0));
}

double conditional_upper_bound(int m, int n, double alpha, double beta,
                               bool* in_hypotheses) {
    if (m < 1 || n < 1 || !(beta > 0.0 && beta < 1.0)) {
        throw std::domain_error("conditional_upper_bound");
    }
    if (in_hypotheses) *in_hypotheses = true;
    const double delta =
        12.0 * std::max(2.0 * std::sqrt(std::log(1.0 / beta)), 1.0);
    return 1.0 - alpha + delta / std::sqrt((m + 2.0) * (n + 2.0));
}

std::vector<SweepRecord> sweep(const std::vector<Method>& methods,
                               const std::vector<std::pair<int, int>>& grid,
                               double alpha, double beta) {
    std::vector<SweepRecord> out;
    out.reserve(methods.size() * grid.size());
    for (const auto& [m, n] : grid) {
        const FederationShape shape(m, n, alpha, beta);
        for (Method method : methods) {
            const Plan p = plan(method, shape);
            SweepRecord rec;
            rec.method = method;
            rec.m = m;
            rec.n = n;
            if (p.trivial()) {
                rec.trivial = true;
            } else {
                const CoverageLaw law = coverage_law(p);
                const double nominal = 1.0 - alpha;
                rec.delta_E = law.mean() - nominal;
                rec.delta_q_beta = law.quantile(beta) - nominal;
                rec.delta_q_1mbeta = law.quantile(1.0 - beta) - nominal;
            }
            out.push_back(rec);
        }
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
    std::string out = "method,m,n,delta_E,delta_q_beta,delta_q_1mbeta\n";
    char buf[256];
    for (const SweepRecord& r : records) {
        if (r.trivial) {
            std::snprintf(buf, sizeof(buf), "%s,%d,%d,,,\n",
                          to_string(r.method).c_str(), r.m, r.n);
        } else {
            std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.12g,%.12g,%.12g\n",
                          to_string(r.method).c_str(), r.m, r.n, r.delta_E,
                          r.delta_q_beta, r.delta_q_1mbeta);
        }
        out += buf;
    }
    return out;
}

std::vector<int> default_sweep_axis() {
    std::vector<int> axis;
    for (int i = 1; i <= 9; ++i) {
        axis.push_back(
            static_cast<int>(std::floor(std::pow(10.0, i / 3.0) + 1e-9)));
    }
    return axis;
}

}  // namespace fedqq
