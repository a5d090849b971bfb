// fedqq: plan quantile-of-quantiles orders for one-shot federated
// conformal prediction, analyze their exact coverage laws, run grid
// sweeps with rate fits, and simulate the one-round protocol.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedqq/beta_beta.hpp"
#include "fedqq/coverage.hpp"
#include "fedqq/expectation.hpp"
#include "fedqq/order_stat.hpp"
#include "fedqq/planners.hpp"
#include "fedqq/poisson_binomial.hpp"
#include "fedqq/quadrature.hpp"
#include "fedqq/rate_fit.hpp"
#include "fedqq/sim.hpp"

namespace {

using namespace fedqq;

struct ShapeOpts {
    int m = 0;
    int n = 0;
    std::vector<int> sizes;
    std::string sizes_from;
    int N = 0;
    std::uint64_t sizes_seed = 0;
    double alpha = 0.1;
    double beta = 0.2;
};

void add_shape_flags(CLI::App* cmd, ShapeOpts* opts) {
    cmd->add_option("--alpha", opts->alpha, "Miscoverage level in (0,1)");
    cmd->add_option("--beta", opts->beta, "Conditional confidence level");
    cmd->add_option("-m", opts->m, "Number of agents");
    cmd->add_option("-n", opts->n, "Common per-agent calibration size");
    cmd->add_option("--sizes", opts->sizes,
                    "Explicit per-agent sizes a,b,c,...")
        ->delimiter(',');
    cmd->add_option("--sizes-from", opts->sizes_from,
                    "Size generator (multinomial: N points uniformly "
                    "assigned to m agents)");
    cmd->add_option("--N", opts->N, "Total calibration size for --sizes-from");
    cmd->add_option("--sizes-seed", opts->sizes_seed,
                    "Seed for --sizes-from (defaults to --seed)");
}

std::vector<int> multinomial_sizes(int m, int N, std::uint64_t seed) {
    if (m < 1 || N < m) {
        throw std::domain_error("multinomial sizes: need m >= 1, N >= m");
    }
    std::mt19937_64 rng(stream_seed(seed, 0, 0));
    std::uniform_int_distribution<int> agent(0, m - 1);
    std::vector<int> ns(m, 0);
    for (int i = 0; i < N; ++i) ns[agent(rng)]++;
    return ns;
}

FederationShape make_shape(const ShapeOpts& o, std::uint64_t fallback_seed) {
    if (!o.sizes_from.empty()) {
        if (o.sizes_from != "multinomial") {
            throw CLI::ValidationError("--sizes-from",
                                       "unknown generator: " + o.sizes_from);
        }
        if (o.m < 1 || o.N < 1) {
            throw CLI::ValidationError("--sizes-from",
                                       "needs -m and --N");
        }
        const std::uint64_t seed =
            o.sizes_seed != 0 ? o.sizes_seed : fallback_seed;
        return FederationShape(o.m, multinomial_sizes(o.m, o.N, seed), o.alpha,
                               o.beta);
    }
    if (!o.sizes.empty()) {
        if (o.m != 0 && o.m != static_cast<int>(o.sizes.size())) {
            throw CLI::ValidationError("--sizes", "length disagrees with -m");
        }
        return FederationShape(static_cast<int>(o.sizes.size()), o.sizes,
                               o.alpha, o.beta);
    }
    if (o.m < 1 || o.n < 1) {
        throw CLI::ValidationError("shape", "need -m and -n (or --sizes)");
    }
    return FederationShape(o.m, o.n, o.alpha, o.beta);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string read_input(const std::string& path) {
    std::ostringstream buf;
    if (path.empty() || path == "-") {
        buf << std::cin.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in) throw std::domain_error("cannot read " + path);
        buf << in.rdbuf();
    }
    return buf.str();
}

std::string g12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

// ---------------------------------------------------------------- plan

int cmd_plan(const ShapeOpts& shape_opts, const std::string& method_name,
             const std::string& out_path, std::uint64_t seed) {
    const Method method = method_from_string(method_name);
    const FederationShape shape = make_shape(shape_opts, seed);
    const Plan p = plan(method, shape);
    if (p.trivial()) {
        std::cerr << "warning: no feasible orders; plan is TRIVIAL "
                     "(predicts the whole outcome space)\n";
    }
    emit(p.to_json(), out_path);
    return 0;
}

// ------------------------------------------------------------ coverage

int cmd_coverage(const std::string& plan_path, double beta_override,
                 int cdf_points, const std::string& out_path) {
    Plan p;
    try {
        p = Plan::from_json(read_input(plan_path));
    } catch (const std::exception& e) {
        throw std::domain_error(std::string("malformed plan: ") + e.what());
    }
    const double beta = beta_override > 0.0 ? beta_override : p.beta;
    const CoverageLaw law = coverage_law(p);
    std::string out = "mean,std,q_beta,q_1mbeta\n";
    out += g12(law.mean()) + "," + g12(law.stddev()) + "," +
           g12(law.quantile(beta)) + "," + g12(law.quantile(1.0 - beta)) +
           "\n";
    if (cdf_points > 0) {
        out += "t,cdf\n";
        for (int i = 0; i < cdf_points; ++i) {
            const double t =
                cdf_points == 1 ? 0.5
                                : static_cast<double>(i) / (cdf_points - 1);
            out += g12(t) + "," + g12(law.cdf(t)) + "\n";
        }
    }
    emit(out, out_path);
    return 0;
}

// --------------------------------------------------------------- sweep

int cmd_sweep(const ShapeOpts& shape_opts,
              const std::vector<std::string>& method_names,
              std::vector<int> grid_m, std::vector<int> grid_n, bool fit,
              double fit_threshold, const std::string& out_path,
              std::uint64_t seed) {
    std::vector<Method> methods;
    for (const auto& name : method_names) {
        methods.push_back(method_from_string(name));
    }
    if (methods.empty()) {
        throw CLI::ValidationError("--method", "at least one method required");
    }

    std::vector<SweepRecord> records;
    if (!shape_opts.sizes_from.empty() || !shape_opts.sizes.empty()) {
        // Unequal-size scenario: one record per method on the given shape.
        const FederationShape shape = make_shape(shape_opts, seed);
        for (Method method : methods) {
            const Plan p = plan(method, shape);
            SweepRecord rec;
            rec.method = method;
            rec.m = shape.m;
            rec.n = shape.total();
            if (p.trivial()) {
                rec.trivial = true;
            } else {
                const CoverageLaw law = coverage_law(p);
                const double nominal = 1.0 - shape.alpha;
                rec.delta_E = law.mean() - nominal;
                rec.delta_q_beta = law.quantile(shape.beta) - nominal;
                rec.delta_q_1mbeta =
                    law.quantile(1.0 - shape.beta) - nominal;
            }
            records.push_back(rec);
        }
    } else {
        if (grid_m.empty()) grid_m = default_sweep_axis();
        if (grid_n.empty()) grid_n = default_sweep_axis();
        std::vector<std::pair<int, int>> grid;
        for (int m : grid_m) {
            for (int n : grid_n) grid.emplace_back(m, n);
        }
        records = sweep(methods, grid, shape_opts.alpha, shape_opts.beta);
    }

    std::string out = sweep_csv(records);
    if (fit) {
        const std::pair<SweepQuantity, const char*> quantities[] = {
            {SweepQuantity::DELTA_E, "delta_E"},
            {SweepQuantity::DELTA_Q_BETA, "delta_q_beta"},
            {SweepQuantity::DELTA_Q_1MBETA, "delta_q_1mbeta"}};
        for (Method method : methods) {
            std::vector<SweepRecord> own;
            for (const SweepRecord& r : records) {
                if (r.method == method) own.push_back(r);
            }
            for (const auto& [q, name] : quantities) {
                try {
                    const RateFit f = fit_rates(own, q, fit_threshold);
                    out += "# fit," + to_string(method) + "," + name + "," +
                           f.to_json() + "\n";
                } catch (const std::domain_error& e) {
                    std::cerr << "fit skipped (" << to_string(method) << ", "
                              << name << "): " << e.what() << "\n";
                }
            }
        }
    }
    emit(out, out_path);
    return 0;
}

// ------------------------------------------------------------ simulate

int cmd_simulate(const ShapeOpts& shape_opts, const std::string& method_name,
                 const std::string& plan_path, const std::string& model_json,
                 int R, std::uint64_t seed, const std::string& out_path) {
    const ScoreModel model = model_json.empty()
                                 ? ScoreModel::uniform()
                                 : ScoreModel::from_json(model_json);
    Plan p;
    if (method_name.empty()) {
        // Plan JSON from --plan, or stdin when piped from `plan`.
        p = Plan::from_json(read_input(plan_path));
    } else {
        p = plan(method_from_string(method_name),
                 make_shape(shape_opts, seed));
    }
    const FederationShape shape(p.m, p.ns, p.alpha, p.beta);

    std::vector<SimResult> results;
    results.reserve(R);
    for (int rep = 0; rep < R; ++rep) {
        const ScoreMatrix scores = draw_scores(shape, model, seed, rep);
        if (p.trivial() || p.central()) {
            results.push_back(run_central(
                p.trivial() ? std::vector<double>{0.0} : scores.pooled(), p,
                &model));
        } else if (p.method == Method::FEDCP_AVG) {
            results.push_back(run_fedcp_avg(shape, scores, p.alpha, &model));
        } else {
            results.push_back(run_qq_protocol(shape, scores, p, &model));
        }
    }
    emit(sim_csv(results), out_path);

    double mean = 0.0;
    for (const SimResult& r : results) mean += r.cond_coverage;
    std::cerr << "mean conditional coverage over " << R
              << " replications: " << g12(mean / R) << "\n";
    return 0;
}

// ------------------------------------------------------------ validate

struct CheckResult {
    std::string name;    // module.invariant
    bool pass;
};

void run_validate_checks(const std::string& fault,
                         std::vector<CheckResult>* out, double tol) {
    // Fault injection wraps beta_cdf through this indirection so a
    // deliberately broken primitive is caught by the named invariant.
    const auto cdf = [&](const OrderStatLaw& law, double t) {
        double v = beta_cdf(law, t);
        if (fault == "beta_cdf") v += 0.05 * t * (1.0 - t);
        return v;
    };
    const auto check = [&](const std::string& name, bool ok) {
        out->push_back({name, ok});
    };

    {
        bool ok = true;
        const OrderStatLaw law(3, 7);
        double prev = -1.0;
        for (int i = 0; i <= 100; ++i) {
            const double v = cdf(law, i / 100.0);
            if (v < prev - 1e-15 || v < 0.0 || v > 1.0) ok = false;
            prev = v;
        }
        check("beta_cdf.monotone", ok);
    }
    {
        bool ok = true;
        const OrderStatLaw law(5, 12);
        for (double p : {0.05, 0.2, 0.5, 0.8, 0.95}) {
            if (std::fabs(cdf(law, beta_quantile(law, p)) - p) > 1e-9 + tol) {
                ok = false;
            }
        }
        check("order_stat.quantile_roundtrip", ok);
    }
    {
        const BetaBetaLaw law(2, 5, 3, 4);
        bool ok = true;
        for (double p : {0.1, 0.5, 0.9}) {
            if (std::fabs(beta_beta_cdf(law, beta_beta_quantile(law, p)) - p) >
                1e-9 + tol) {
                ok = false;
            }
        }
        check("beta_beta.quantile_roundtrip", ok);
    }
    {
        // PB with equal probabilities is Binomial; compare with the
        // order-statistic identity F_Bin(k-1) = 1 - F_{U(k:m)}(p).
        const int m = 9;
        const double p = 0.37;
        const PoissonBinomialLaw pb(std::vector<double>(m, p));
        bool ok = true;
        for (int k = 1; k <= m; ++k) {
            const double lhs = pb.cdf(k - 1);
            const double rhs = 1.0 - cdf(OrderStatLaw(k, m), p);
            if (std::fabs(lhs - rhs) > 1e-12 + tol) ok = false;
        }
        check("poisson_binomial.binomial_identity", ok);
    }
    {
        const double v =
            integrate([](double t) { return 3.0 * t * t; }, 0.0, 1.0, 1e-12);
        check("quadrature.polynomial", std::fabs(v - 1.0) <= 1e-10 + tol);
    }
    {
        bool ok = true;
        for (int ell = 1; ell <= 4 && ok; ++ell) {
            for (int k = 1; k <= 3 && ok; ++k) {
                const PairOrder order(ell, 4, k, 3);
                if (std::fabs(m_lk_exact(order) -
                              m_lk_quadrature(order, 1e-11)) > 1e-9 + tol) {
                    ok = false;
                }
            }
        }
        check("expectation.exact_vs_quadrature", ok);
    }
    {
        bool ok = true;
        for (int m = 1; m <= 6 && ok; ++m) {
            for (int n = 1; n <= 6 && ok; ++n) {
                const Plan p = plan_qqm(FederationShape(m, n, 0.1, 0.2));
                const bool lemma_trivial = m * n < 1.0 / 0.1 - 1.0;
                if (p.trivial() != lemma_trivial) ok = false;
                if (!p.trivial() &&
                    p.predicted->mean < 0.9 - 1e-9) {
                    ok = false;
                }
            }
        }
        check("planners.qqm_feasibility", ok);
    }
    {
        const Plan p = plan_qqc(FederationShape(40, 25, 0.1, 0.2));
        const CoverageLaw law = coverage_law(p);
        bool ok = !p.trivial() && law.quantile(0.2) >= 0.9 - 1e-9;
        for (double q : {0.1, 0.5, 0.9}) {
            if (std::fabs(law.cdf(law.quantile(q)) - q) > 1e-9 + tol) {
                ok = false;
            }
        }
        check("coverage.law_roundtrip", ok);
    }
    {
        const FederationShape shape(5, 8, 0.1, 0.2);
        const Plan p = plan_qqm_fast(shape);
        const ReplicateSummary a =
            replicate(shape, ScoreModel::uniform(), p, 200, 42);
        const ReplicateSummary b =
            replicate(shape, ScoreModel::uniform(), p, 200, 42);
        check("fed_sim.seed_determinism", a.coverages == b.coverages);
    }
}

int cmd_validate(const std::string& fault, double tol) {
    std::vector<CheckResult> checks;
    run_validate_checks(fault, &checks, tol);
    std::string out = "check,status\n";
    int failures = 0;
    std::map<std::string, std::pair<int, int>> per_module;  // pass, fail
    for (const CheckResult& c : checks) {
        out += c.name + "," + (c.pass ? "PASS" : "FAIL") + "\n";
        const std::string module = c.name.substr(0, c.name.find('.'));
        if (c.pass) {
            per_module[module].first++;
        } else {
            per_module[module].second++;
            failures++;
            std::cerr << "FAIL: " << c.name << "\n";
        }
    }
    std::cout << out;
    for (const auto& [module, counts] : per_module) {
        std::cerr << module << ": " << counts.first << " passed, "
                  << counts.second << " failed\n";
    }
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantile-of-quantiles planning and analysis for one-shot "
                 "federated conformal prediction"};
    app.require_subcommand(1);

    ShapeOpts shape_opts;
    std::string method = "qqm";
    std::vector<std::string> methods;
    std::string out_path, plan_path, model_json;
    std::uint64_t seed = 1;
    double tol = 0.0;
    double beta_override = -1.0;
    int cdf_points = 0;
    std::vector<int> grid_m, grid_n;
    bool fit = false;
    double fit_threshold = 1.0;
    int R = 1000;
    std::string fault;
    std::string format = "json";

    CLI::App* plan_cmd = app.add_subcommand("plan", "Select quantile orders");
    add_shape_flags(plan_cmd, &shape_opts);
    plan_cmd->add_option("--method", method, "Planner")->required();
    plan_cmd->add_option("--out", out_path, "Output file (default stdout)");
    plan_cmd->add_option("--format", format, "json");
    plan_cmd->add_option("--seed", seed, "Seed (size generation)");

    CLI::App* cov_cmd =
        app.add_subcommand("coverage", "Coverage law of a plan");
    cov_cmd->add_option("--plan", plan_path, "Plan JSON path (default stdin)");
    cov_cmd->add_option("--beta", beta_override, "Quantile level override");
    cov_cmd->add_option("--cdf", cdf_points, "Append an N-point cdf table");
    cov_cmd->add_option("--out", out_path, "Output file");
    cov_cmd->add_option("--format", format, "csv");
    cov_cmd->add_option("--tol", tol, "Extra comparison slack");

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Coverage-gap grid study");
    add_shape_flags(sweep_cmd, &shape_opts);
    sweep_cmd->add_option("--method", methods, "Methods to sweep")
        ->delimiter(',')
        ->required();
    sweep_cmd->add_option("--grid-m", grid_m, "m axis (default paper grid)")
        ->delimiter(',');
    sweep_cmd->add_option("--grid-n", grid_n, "n axis (default paper grid)")
        ->delimiter(',');
    sweep_cmd->add_flag("--fit", fit, "Append Huber rate fits");
    sweep_cmd->add_option("--fit-threshold", fit_threshold,
                          "Huber threshold on log residuals");
    sweep_cmd->add_option("--out", out_path, "Output file");
    sweep_cmd->add_option("--format", format, "csv");
    sweep_cmd->add_option("--seed", seed, "Seed (size generation)");

    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "Replicate the one-round protocol");
    add_shape_flags(sim_cmd, &shape_opts);
    sim_cmd->add_option("--method", method, "Planner for the simulated plan");
    sim_cmd->add_option("--plan", plan_path, "Use an existing plan JSON");
    sim_cmd->add_option("--model", model_json,
                        "Score model JSON, e.g. {\"kind\":\"uniform\"}");
    sim_cmd->add_option("-R,--replications", R, "Replication count");
    sim_cmd->add_option("--seed", seed, "Master seed")->required();
    sim_cmd->add_option("--out", out_path, "Output file");
    sim_cmd->add_option("--format", format, "csv");

    CLI::App* val_cmd =
        app.add_subcommand("validate", "Run the fast self-check suite");
    val_cmd->add_option("--inject-fault", fault,
                        "Deliberately break a primitive (testing hook)");
    val_cmd->add_option("--tol", tol, "Extra comparison slack");

    try {
        app.parse(argc, argv);
        if (plan_cmd->parsed()) {
            return cmd_plan(shape_opts, method, out_path, seed);
        }
        if (cov_cmd->parsed()) {
            return cmd_coverage(plan_path, beta_override, cdf_points,
                                out_path);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(shape_opts, methods, grid_m, grid_n, fit,
                             fit_threshold, out_path, seed);
        }
        if (sim_cmd->parsed()) {
            // Without an explicit --method the plan comes from --plan/stdin.
            if (sim_cmd->count("--method") == 0) method.clear();
            return cmd_simulate(shape_opts, method, plan_path, model_json, R,
                                seed, out_path);
        }
        if (val_cmd->parsed()) return cmd_validate(fault, tol);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    } catch (const QuadratureError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
