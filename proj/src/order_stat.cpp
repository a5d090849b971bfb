#include "fedqq/order_stat.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fedqq {

namespace {

constexpr int kMaxIter = 500;
constexpr double kCfEps = 1e-16;
constexpr double kTinyDen = 1e-300;

// Continued fraction for the incomplete Beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTinyDen) d = kTinyDen;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTinyDen) d = kTinyDen;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTinyDen) c = kTinyDen;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTinyDen) d = kTinyDen;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTinyDen) c = kTinyDen;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kCfEps) break;
    }
    return h;
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// I_x(a,b), symmetry switch at x = (a+1)/(a+b+2).
double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lfront =
        a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(lfront) * beta_cf(a, b, x) / a;
    }
    return 1.0 - std::exp(lfront) * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

OrderStatLaw::OrderStatLaw(int r_, int N_) : r(r_), N(N_) {
    if (N < 1 || r < 1 || r > N) {
        throw std::domain_error("OrderStatLaw: requires 1 <= r <= N");
    }
}

double beta_cdf(const OrderStatLaw& law, double t) {
    if (t < 0.0 || t > 1.0) {
        throw std::domain_error("beta_cdf: t must lie in [0,1]");
    }
    return inc_beta(static_cast<double>(law.r),
                    static_cast<double>(law.N - law.r + 1), t);
}

double beta_pdf(const OrderStatLaw& law, double t) {
    if (t < 0.0 || t > 1.0) {
        throw std::domain_error("beta_pdf: t must lie in [0,1]");
    }
    const double a = law.r;
    const double b = law.N - law.r + 1;
    if (t == 0.0) return a == 1.0 ? b : 0.0;
    if (t == 1.0) return b == 1.0 ? a : 0.0;
    return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) -
                    log_beta(a, b));
}

double beta_quantile(const OrderStatLaw& law, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("beta_quantile: p must lie in (0,1)");
    }
    double lo = 0.0, hi = 1.0;
    double x = static_cast<double>(law.r) / (law.N + 1);  // mean as start
    for (int it = 0; it < 200; ++it) {
        const double f = beta_cdf(law, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        if (std::fabs(f) <= 1e-13 || hi - lo < 1e-16) break;
        const double dfdx = beta_pdf(law, x);
        double next = (dfdx > 0.0) ? x - f / dfdx
                                   : std::numeric_limits<double>::quiet_NaN();
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisect
        x = next;
    }
    return x;
}

std::pair<double, double> beta_quantile_bounds(const OrderStatLaw& law,
                                               double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::domain_error("beta_quantile_bounds: delta must lie in (0,1)");
    }
    const double center = static_cast<double>(law.r) / (law.N + 1);
    const double half = std::sqrt(std::log(1.0 / delta) / (2.0 * (law.N + 2)));
    return {center - half, center + half};
}

}  // namespace fedqq
