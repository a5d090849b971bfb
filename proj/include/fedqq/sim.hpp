#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fedqq/plan.hpp"

namespace fedqq {

enum class ScoreModelKind {
    UNIFORM,
    EXPONENTIAL,
    BERNOULLI,
    GAUSSIAN_RESIDUAL,
    CUSTOM
};

/// Nonconformity-score generator with (when known) an analytic cdf.
struct ScoreModel {
    ScoreModelKind kind = ScoreModelKind::UNIFORM;
    double a = 0.0, b = 1.0;  // UNIFORM support
    double lambda = 1.0;      // EXPONENTIAL rate
    double p = 0.5;           // BERNOULLI success probability
    double sigma = 1.0;       // GAUSSIAN_RESIDUAL scale (scores |eps|)

    // CUSTOM hooks; custom_cdf may be empty (empirical coverage only).
    std::function<double(std::mt19937_64&)> custom_sampler;
    std::function<double(double)> custom_cdf;

    double sample(std::mt19937_64& rng) const;
    bool has_cdf() const;
    double cdf(double s) const;

    static ScoreModel uniform(double a = 0.0, double b = 1.0);
    static ScoreModel exponential(double lambda = 1.0);
    static ScoreModel bernoulli(double p);
    static ScoreModel gaussian_residual(double sigma = 1.0);
    static ScoreModel from_json(const std::string& text);
};

/// Per-agent calibration scores.
struct ScoreMatrix {
    std::vector<std::vector<double>> scores;

    int agents() const { return static_cast<int>(scores.size()); }
    std::vector<double> pooled() const;
};

/// Deterministic stream id for (master seed, replication, agent).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t replication,
                          std::uint64_t agent);

ScoreMatrix draw_scores(const FederationShape& shape, const ScoreModel& model,
                        std::uint64_t seed, std::uint64_t replication = 0);

/// The one message per agent that crossed the agent/server boundary.
struct ProtocolTrace {
    std::vector<double> messages;
};

struct SimResult {
    double threshold = 0.0;
    double cond_coverage = 0.0;  // F_S(threshold); NaN when cdf unknown
    double emp_coverage = 0.0;   // NaN unless evaluated on test scores
    double length = 0.0;         // 2*threshold for residual models, else NaN
    ProtocolTrace trace;
};

/// One-shot QQ protocol: agent j sends its ell_j-th smallest score, the
/// server keeps the k-th smallest message. TRIVIAL plans yield an
/// infinite threshold with coverage 1.
SimResult run_qq_protocol(const FederationShape& shape,
                          const ScoreMatrix& scores, const Plan& plan,
                          const ScoreModel* model = nullptr);

/// Centralized split CP on pooled scores with the plan's rank r.
SimResult run_central(const std::vector<double>& pooled, const Plan& plan,
                      const ScoreModel* model = nullptr);

/// FedCP-Avg baseline: mean over agents of the local
/// ceil((n_j+1)(1-alpha))-th smallest score (clamped to n_j).
SimResult run_fedcp_avg(const FederationShape& shape,
                        const ScoreMatrix& scores, double alpha,
                        const ScoreModel* model = nullptr);

double empirical_coverage(double threshold, const std::vector<double>& test);

struct ReplicateSummary {
    std::vector<double> coverages;  // sorted conditional coverages
    double mean = 0.0;
    double stddev = 0.0;

    double quantile(double p) const;
};

/// R independent calibrations of the plan under the model; coverages are
/// the analytic F_S(threshold) values. Deterministic given seed.
ReplicateSummary replicate(const FederationShape& shape,
                           const ScoreModel& model, const Plan& plan, int R,
                           std::uint64_t seed);

/// Closed-form FedCP-Avg coverage for UNIFORM / EXPONENTIAL / BERNOULLI
/// models with one shared local order; throws for other models.
double avg_analytic_coverage(const ScoreModel& model,
                             const FederationShape& shape,
                             const std::vector<int>& ells);

std::string sim_csv(const std::vector<SimResult>& results);

}  // namespace fedqq
