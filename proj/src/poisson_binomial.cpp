#include "fedqq/poisson_binomial.hpp"

#include <stdexcept>

namespace fedqq {

PoissonBinomialLaw::PoissonBinomialLaw(std::vector<double> probs)
    : probs_(std::move(probs)) {
    for (double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::domain_error(
                "PoissonBinomialLaw: probabilities must lie in [0,1]");
        }
    }
    pmf_.assign(probs_.size() + 1, 0.0);
    pmf_[0] = 1.0;
    int count = 0;
    for (double p : probs_) {
        ++count;
        for (int j = count; j >= 1; --j) {
            pmf_[j] = pmf_[j] * (1.0 - p) + pmf_[j - 1] * p;
        }
        pmf_[0] *= (1.0 - p);
    }
}

double PoissonBinomialLaw::cdf(int j) const {
    if (j < 0) return 0.0;
    if (j >= size()) return 1.0;
    double s = 0.0;
    for (int i = 0; i <= j; ++i) s += pmf_[i];
    return s < 1.0 ? s : 1.0;
}

double PoissonBinomialLaw::pmf(int j) const {
    if (j < 0 || j > size()) return 0.0;
    return pmf_[j];
}

}  // namespace fedqq
