#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedqq {

enum class Method {
    QQM,
    QQM_FAST,
    QQC,
    QQC_FAST,
    QQM_NJ,
    QQC_NJ,
    CENTRAL_M,
    CENTRAL_C,
    FEDCP_AVG
};

enum class Guarantee { MARGINAL, TRAINING_CONDITIONAL, NONE, TRIVIAL };

std::string to_string(Method m);
std::string to_string(Guarantee g);
Method method_from_string(const std::string& s);
Guarantee guarantee_from_string(const std::string& s);

/// Problem shape: m agents with calibration sizes ns and risk levels
/// alpha (miscoverage) and beta (confidence; unused by marginal planners).
struct FederationShape {
    int m;
    std::vector<int> ns;
    double alpha;
    double beta;

    FederationShape(int m_, std::vector<int> ns_, double alpha_, double beta_);
    /// Equal-size convenience constructor.
    FederationShape(int m_, int n_, double alpha_, double beta_);

    bool equal_sizes() const;
    /// Common n; throws if sizes differ.
    int common_n() const;
    int total() const;
};

struct PredictedCoverage {
    double mean;
    double q_lo;  // beta-quantile of the coverage
    double q_hi;  // (1-beta)-quantile
};

/// A calibration rule: which orders to use and what it certifies.
struct Plan {
    Method method;
    int m = 1;
    std::vector<int> ns;
    double alpha = 0.1;
    double beta = 0.2;

    // Federated methods use per-agent orders ells plus the server order k;
    // central methods use the single rank r.
    std::vector<int> ells;
    int k = 0;
    int r = 0;

    Guarantee guarantee = Guarantee::NONE;
    std::optional<PredictedCoverage> predicted;
    std::vector<std::string> flags;

    bool trivial() const { return guarantee == Guarantee::TRIVIAL; }
    bool central() const {
        return method == Method::CENTRAL_M || method == Method::CENTRAL_C;
    }
    /// True when all agents share one size and one local order.
    bool uniform_orders() const;

    std::string to_json() const;
    static Plan from_json(const std::string& text);
};

}  // namespace fedqq
