#include "fedqq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "fedqq/order_stat.hpp"
#include "fedqq/planners.hpp"

namespace fedqq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// r-th smallest (1-based) via a stable copy-and-sort.
double order_stat(std::vector<double> v, int r) {
    if (r < 1 || r > static_cast<int>(v.size())) {
        throw std::domain_error("order_stat: rank out of range");
    }
    std::sort(v.begin(), v.end());
    return v[r - 1];
}

int avg_local_order(int n, double alpha, bool* clamped) {
    int ell = static_cast<int>(std::ceil((1.0 - alpha) * (n + 1) - 1e-9));
    if (ell > n) {
        ell = n;
        if (clamped) *clamped = true;
    }
    return ell;
}

SimResult make_result(double threshold, const ScoreModel* model,
                      ProtocolTrace trace) {
    SimResult res;
    res.threshold = threshold;
    res.cond_coverage =
        (model && model->has_cdf()) ? model->cdf(threshold) : kNaN;
    res.emp_coverage = kNaN;
    res.length = (model && model->kind == ScoreModelKind::GAUSSIAN_RESIDUAL)
                     ? 2.0 * threshold
                     : kNaN;
    res.trace = std::move(trace);
    return res;
}

SimResult trivial_result() {
    SimResult res;
    res.threshold = std::numeric_limits<double>::infinity();
    res.cond_coverage = 1.0;
    res.emp_coverage = kNaN;
    res.length = kNaN;
    return res;
}

}  // namespace

double ScoreModel::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    switch (kind) {
        case ScoreModelKind::UNIFORM:
            return a + (b - a) * u01(rng);
        case ScoreModelKind::EXPONENTIAL:
            return -std::log1p(-u01(rng)) / lambda;
        case ScoreModelKind::BERNOULLI:
            return u01(rng) < p ? 1.0 : 0.0;
        case ScoreModelKind::GAUSSIAN_RESIDUAL: {
            std::normal_distribution<double> normal(0.0, sigma);
            return std::fabs(normal(rng));
        }
        case ScoreModelKind::CUSTOM:
            if (!custom_sampler) {
                throw std::domain_error("ScoreModel: no custom sampler");
            }
            return custom_sampler(rng);
    }
    throw std::logic_error("ScoreModel::sample");
}

bool ScoreModel::has_cdf() const {
    return kind != ScoreModelKind::CUSTOM || static_cast<bool>(custom_cdf);
}

double ScoreModel::cdf(double s) const {
    switch (kind) {
        case ScoreModelKind::UNIFORM:
            if (s <= a) return 0.0;
            if (s >= b) return 1.0;
            return (s - a) / (b - a);
        case ScoreModelKind::EXPONENTIAL:
            return s <= 0.0 ? 0.0 : -std::expm1(-lambda * s);
        case ScoreModelKind::BERNOULLI:
            if (s < 0.0) return 0.0;
            return s < 1.0 ? 1.0 - p : 1.0;
        case ScoreModelKind::GAUSSIAN_RESIDUAL:
            return s <= 0.0 ? 0.0 : std::erf(s / (sigma * std::sqrt(2.0)));
        case ScoreModelKind::CUSTOM:
            if (!custom_cdf) {
                throw std::domain_error("ScoreModel: no custom cdf");
            }
            return custom_cdf(s);
    }
    throw std::logic_error("ScoreModel::cdf");
}

ScoreModel ScoreModel::uniform(double a, double b) {
    if (!(a < b)) throw std::domain_error("uniform: need a < b");
    ScoreModel m;
    m.kind = ScoreModelKind::UNIFORM;
    m.a = a;
    m.b = b;
    return m;
}

ScoreModel ScoreModel::exponential(double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("exponential: lambda > 0");
    ScoreModel m;
    m.kind = ScoreModelKind::EXPONENTIAL;
    m.lambda = lambda;
    return m;
}

ScoreModel ScoreModel::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("bernoulli: p in [0,1]");
    ScoreModel m;
    m.kind = ScoreModelKind::BERNOULLI;
    m.p = p;
    return m;
}

ScoreModel ScoreModel::gaussian_residual(double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("gaussian_residual: sigma > 0");
    ScoreModel m;
    m.kind = ScoreModelKind::GAUSSIAN_RESIDUAL;
    m.sigma = sigma;
    return m;
}

ScoreModel ScoreModel::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform") {
        return uniform(j.value("a", 0.0), j.value("b", 1.0));
    }
    if (kind == "exponential") return exponential(j.value("lambda", 1.0));
    if (kind == "bernoulli") return bernoulli(j.at("p").get<double>());
    if (kind == "gaussian-residual") {
        return gaussian_residual(j.value("sigma", 1.0));
    }
    throw std::domain_error("ScoreModel: unknown kind " + kind);
}

std::vector<double> ScoreMatrix::pooled() const {
    std::vector<double> all;
    for (const auto& s : scores) all.insert(all.end(), s.begin(), s.end());
    return all;
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t replication,
                          std::uint64_t agent) {
    std::uint64_t state = master;
    splitmix64(state);
    state ^= splitmix64(state) + replication;
    state ^= splitmix64(state) + agent;
    return splitmix64(state);
}

ScoreMatrix draw_scores(const FederationShape& shape, const ScoreModel& model,
                        std::uint64_t seed, std::uint64_t replication) {
    ScoreMatrix mat;
    mat.scores.resize(shape.m);
    for (int j = 0; j < shape.m; ++j) {
        std::mt19937_64 rng(stream_seed(seed, replication, j));
        mat.scores[j].resize(shape.ns[j]);
        for (double& s : mat.scores[j]) s = model.sample(rng);
    }
    return mat;
}

SimResult run_qq_protocol(const FederationShape& shape,
                          const ScoreMatrix& scores, const Plan& plan,
                          const ScoreModel* model) {
    if (plan.trivial()) return trivial_result();
    if (scores.agents() != shape.m ||
        static_cast<int>(plan.ells.size()) != shape.m) {
        throw std::domain_error("run_qq_protocol: shape mismatch");
    }
    ProtocolTrace trace;
    trace.messages.resize(shape.m);
    for (int j = 0; j < shape.m; ++j) {
        if (static_cast<int>(scores.scores[j].size()) != shape.ns[j]) {
            throw std::domain_error("run_qq_protocol: score sizes mismatch");
        }
        trace.messages[j] = order_stat(scores.scores[j], plan.ells[j]);
    }
    const double threshold = order_stat(trace.messages, plan.k);
    return make_result(threshold, model, std::move(trace));
}

SimResult run_central(const std::vector<double>& pooled, const Plan& plan,
                      const ScoreModel* model) {
    if (plan.trivial()) return trivial_result();
    return make_result(order_stat(pooled, plan.r), model, {});
}

SimResult run_fedcp_avg(const FederationShape& shape,
                        const ScoreMatrix& scores, double alpha,
                        const ScoreModel* model) {
    if (scores.agents() != shape.m) {
        throw std::domain_error("run_fedcp_avg: shape mismatch");
    }
    ProtocolTrace trace;
    trace.messages.resize(shape.m);
    for (int j = 0; j < shape.m; ++j) {
        const int ell = avg_local_order(shape.ns[j], alpha, nullptr);
        trace.messages[j] = order_stat(scores.scores[j], ell);
    }
    const double threshold =
        std::accumulate(trace.messages.begin(), trace.messages.end(), 0.0) /
        shape.m;
    return make_result(threshold, model, std::move(trace));
}

double empirical_coverage(double threshold, const std::vector<double>& test) {
    if (test.empty()) throw std::domain_error("empirical_coverage: no scores");
    const auto covered = std::count_if(
        test.begin(), test.end(), [&](double s) { return s <= threshold; });
    return static_cast<double>(covered) / static_cast<double>(test.size());
}

double ReplicateSummary::quantile(double p) const {
    if (coverages.empty() || !(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("ReplicateSummary::quantile");
    }
    const double rank = std::ceil(p * static_cast<double>(coverages.size()));
    const size_t idx = rank < 1.0 ? 0 : static_cast<size_t>(rank) - 1;
    return coverages[std::min(idx, coverages.size() - 1)];
}

ReplicateSummary replicate(const FederationShape& shape,
                           const ScoreModel& model, const Plan& plan, int R,
                           std::uint64_t seed) {
    if (R < 1) throw std::domain_error("replicate: R >= 1");
    if (!model.has_cdf()) {
        throw std::domain_error("replicate: model needs an analytic cdf");
    }
    ReplicateSummary summary;
    summary.coverages.reserve(R);
    for (int rep = 0; rep < R; ++rep) {
        const ScoreMatrix scores = draw_scores(shape, model, seed, rep);
        SimResult res;
        if (plan.trivial()) {
            res = trivial_result();
        } else if (plan.central()) {
            res = run_central(scores.pooled(), plan, &model);
        } else if (plan.method == Method::FEDCP_AVG) {
            res = run_fedcp_avg(shape, scores, plan.alpha, &model);
        } else {
            res = run_qq_protocol(shape, scores, plan, &model);
        }
        summary.coverages.push_back(res.cond_coverage);
    }
    const double R_d = static_cast<double>(R);
    summary.mean = std::accumulate(summary.coverages.begin(),
                                   summary.coverages.end(), 0.0) /
                   R_d;
    double ss = 0.0;
    for (double c : summary.coverages) {
        ss += (c - summary.mean) * (c - summary.mean);
    }
    summary.stddev = R > 1 ? std::sqrt(ss / (R_d - 1.0)) : 0.0;
    std::sort(summary.coverages.begin(), summary.coverages.end());
    return summary;
}

double avg_analytic_coverage(const ScoreModel& model,
                             const FederationShape& shape,
                             const std::vector<int>& ells) {
    if (static_cast<int>(ells.size()) != shape.m) {
        throw std::domain_error("avg_analytic_coverage: ells size");
    }
    const bool uniform_orders =
        shape.equal_sizes() &&
        std::all_of(ells.begin(), ells.end(),
                    [&](int e) { return e == ells.front(); });
    if (!uniform_orders) {
        throw std::domain_error(
            "avg_analytic_coverage: needs one shared (ell, n)");
    }
    const int n = shape.ns.front();
    const int ell = ells.front();
    const int m = shape.m;
    if (ell < 1 || ell > n) {
        throw std::domain_error("avg_analytic_coverage: ell out of range");
    }
    switch (model.kind) {
        case ScoreModelKind::UNIFORM:
            return static_cast<double>(ell) / (n + 1);
        case ScoreModelKind::BERNOULLI: {
            // Averaged threshold hits 1 only when every agent's message is
            // 1, which happens with probability F_{U(n-ell+1:n)}(p)^m.
            const double q = beta_cdf(OrderStatLaw(n - ell + 1, n), model.p);
            return (1.0 - model.p) + model.p * std::pow(q, m);
        }
        case ScoreModelKind::EXPONENTIAL: {
            double prod = 1.0;
            for (int j = 1; j <= ell; ++j) {
                prod *= std::pow(1.0 + 1.0 / (m * (n - j + 1.0)),
                                 -static_cast<double>(m));
            }
            return 1.0 - prod;
        }
        default:
            throw std::domain_error(
                "avg_analytic_coverage: no closed form for this model");
    }
}

std::string sim_csv(const std::vector<SimResult>& results) {
    std::string out = "replication,threshold,cond_coverage,emp_coverage,length\n";
    char buf[256];
    for (size_t i = 0; i < results.size(); ++i) {
        const SimResult& r = results[i];
        std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%.12g,%.12g\n", i,
                      r.threshold, r.cond_coverage, r.emp_coverage, r.length);
        out += buf;
    }
    return out;
}

}  // namespace fedqq
