#pragma once

#include <vector>

namespace fedqq {

/// Distribution of a sum of independent Bernoulli(p_j) variables.
/// The pmf is built once by the exact dynamic-programming convolution
/// over agents: O(m^2) time, O(m) space.
class PoissonBinomialLaw {
  public:
    explicit PoissonBinomialLaw(std::vector<double> probs);

    /// P(Z_1 + ... + Z_m <= j); 1 for j >= m, 0 for j < 0.
    double cdf(int j) const;
    double pmf(int j) const;
    int size() const { return static_cast<int>(probs_.size()); }

  private:
    std::vector<double> probs_;
    std::vector<double> pmf_;
};

}  // namespace fedqq
