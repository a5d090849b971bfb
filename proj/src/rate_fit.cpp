#include "fedqq/rate_fit.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fedqq {

namespace {

// Solve a symmetric 3x3 system by Gaussian elimination with partial
// pivoting; throws on (near-)singular designs.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> A,
                             std::array<double, 3> b) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::fabs(A[row][col]) > std::fabs(A[piv][col])) piv = row;
        }
        if (std::fabs(A[piv][col]) < 1e-12) {
            throw std::domain_error("fit_rates: rank-deficient design");
        }
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = A[row][col] / A[col][col];
            for (int c2 = col; c2 < 3; ++c2) A[row][c2] -= f * A[col][c2];
            b[row] -= f * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int row = 2; row >= 0; --row) {
        double s = b[row];
        for (int c2 = row + 1; c2 < 3; ++c2) s -= A[row][c2] * x[c2];
        x[row] = s / A[row][row];
    }
    return x;
}

double quantity_of(const SweepRecord& r, SweepQuantity q) {
    switch (q) {
        case SweepQuantity::DELTA_E: return r.delta_E;
        case SweepQuantity::DELTA_Q_BETA: return r.delta_q_beta;
        case SweepQuantity::DELTA_Q_1MBETA: return r.delta_q_1mbeta;
    }
    throw std::logic_error("quantity_of");
}

}  // namespace

std::string RateFit::to_json() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "{\"c\": %.12g, \"gamma\": %.12g, \"delta\": %.12g, "
                  "\"loss\": %.12g}",
                  c, gamma, delta, loss);
    return buf;
}

RateFit fit_rates(const std::vector<SweepRecord>& records,
                  SweepQuantity quantity, double huber_threshold) {
    std::vector<std::array<double, 3>> X;  // (1, -log m, -log n)
    std::vector<double> y;                 // log of the gap
    for (const SweepRecord& r : records) {
        if (r.trivial) continue;
        // Fit magnitudes: marginal methods can sit below the nominal
        // level at the beta-quantile, and the model needs log y.
        const double v = std::fabs(quantity_of(r, quantity));
        if (!(v > 0.0)) continue;
        X.push_back({1.0, -std::log(static_cast<double>(r.m)),
                     -std::log(static_cast<double>(r.n))});
        y.push_back(std::log(v));
    }
    const size_t n_obs = X.size();
    if (n_obs < 6) {
        throw std::domain_error("fit_rates: need >= 6 usable records");
    }
    bool m_varies = false, n_varies = false;
    for (size_t i = 1; i < n_obs; ++i) {
        if (X[i][1] != X[0][1]) m_varies = true;
        if (X[i][2] != X[0][2]) n_varies = true;
    }
    if (!m_varies && !n_varies) {
        throw std::domain_error("fit_rates: rank-deficient design");
    }

    const double tau = huber_threshold;
    std::array<double, 3> theta{0.0, 0.0, 0.0};
    std::vector<double> w(n_obs, 1.0);
    for (int it = 0; it < 500; ++it) {
        std::array<std::array<double, 3>, 3> A{};
        std::array<double, 3> b{};
        for (size_t i = 0; i < n_obs; ++i) {
            for (int r2 = 0; r2 < 3; ++r2) {
                for (int c2 = 0; c2 < 3; ++c2) {
                    A[r2][c2] += w[i] * X[i][r2] * X[i][c2];
                }
                b[r2] += w[i] * X[i][r2] * y[i];
            }
        }
        const std::array<double, 3> next = solve3(A, b);
        double step = 0.0;
        for (int j = 0; j < 3; ++j) {
            step = std::max(step, std::fabs(next[j] - theta[j]));
        }
        theta = next;
        for (size_t i = 0; i < n_obs; ++i) {
            const double resid = y[i] - theta[0] * X[i][0] -
                                 theta[1] * X[i][1] - theta[2] * X[i][2];
            w[i] = std::fabs(resid) <= tau ? 1.0 : tau / std::fabs(resid);
        }
        if (it > 0 && step < 1e-10) break;
    }

    double loss = 0.0;
    for (size_t i = 0; i < n_obs; ++i) {
        const double resid = std::fabs(y[i] - theta[0] * X[i][0] -
                                       theta[1] * X[i][1] - theta[2] * X[i][2]);
        loss += resid <= tau ? 0.5 * resid * resid
                             : tau * (resid - 0.5 * tau);
    }

    RateFit fit;
    fit.c = std::exp(theta[0]);
    fit.gamma = theta[1];
    fit.delta = theta[2];
    fit.loss = loss;
    return fit;
}

}  // namespace fedqq
