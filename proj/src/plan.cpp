#include "fedqq/plan.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

namespace fedqq {

namespace {

using nlohmann::json;

// 12 significant digits, emitted as a JSON number.
json num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return json::parse(buf);
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::QQM: return "qqm";
        case Method::QQM_FAST: return "qqm-fast";
        case Method::QQC: return "qqc";
        case Method::QQC_FAST: return "qqc-fast";
        case Method::QQM_NJ: return "qqm-nj";
        case Method::QQC_NJ: return "qqc-nj";
        case Method::CENTRAL_M: return "central-m";
        case Method::CENTRAL_C: return "central-c";
        case Method::FEDCP_AVG: return "fedcp-avg";
    }
    throw std::logic_error("to_string: unknown method");
}

std::string to_string(Guarantee g) {
    switch (g) {
        case Guarantee::MARGINAL: return "MARGINAL";
        case Guarantee::TRAINING_CONDITIONAL: return "TRAINING_CONDITIONAL";
        case Guarantee::NONE: return "NONE";
        case Guarantee::TRIVIAL: return "TRIVIAL";
    }
    throw std::logic_error("to_string: unknown guarantee");
}

Method method_from_string(const std::string& s) {
    for (Method m : {Method::QQM, Method::QQM_FAST, Method::QQC,
                     Method::QQC_FAST, Method::QQM_NJ, Method::QQC_NJ,
                     Method::CENTRAL_M, Method::CENTRAL_C, Method::FEDCP_AVG}) {
        if (to_string(m) == s) return m;
    }
    throw std::domain_error("unknown method: " + s);
}

Guarantee guarantee_from_string(const std::string& s) {
    for (Guarantee g : {Guarantee::MARGINAL, Guarantee::TRAINING_CONDITIONAL,
                        Guarantee::NONE, Guarantee::TRIVIAL}) {
        if (to_string(g) == s) return g;
    }
    throw std::domain_error("unknown guarantee: " + s);
}

bool Plan::uniform_orders() const {
    if (central()) return false;
    if (ells.empty()) return false;
    const bool same_ell = std::all_of(
        ells.begin(), ells.end(), [&](int e) { return e == ells.front(); });
    const bool same_n = std::all_of(
        ns.begin(), ns.end(), [&](int n) { return n == ns.front(); });
    return same_ell && same_n;
}

std::string Plan::to_json() const {
    json j;
    j["method"] = fedqq::to_string(method);
    j["m"] = m;
    j["ns"] = ns;
    j["alpha"] = num(alpha);
    j["beta"] = num(beta);
    json orders;
    if (central()) {
        orders["r"] = r;
    } else {
        orders["ells"] = ells;
        orders["k"] = k;
    }
    j["orders"] = orders;
    j["guarantee"] = fedqq::to_string(guarantee);
    if (predicted) {
        j["predicted"] = {{"mean", num(predicted->mean)},
                          {"q_lo", num(predicted->q_lo)},
                          {"q_hi", num(predicted->q_hi)}};
    }
    j["flags"] = flags;
    return j.dump(2);
}

Plan Plan::from_json(const std::string& text) {
    const json j = json::parse(text);
    Plan p;
    p.method = method_from_string(j.at("method").get<std::string>());
    p.m = j.at("m").get<int>();
    p.ns = j.at("ns").get<std::vector<int>>();
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    const json& orders = j.at("orders");
    if (orders.contains("r")) {
        p.r = orders.at("r").get<int>();
    } else {
        p.ells = orders.at("ells").get<std::vector<int>>();
        p.k = orders.at("k").get<int>();
    }
    p.guarantee = guarantee_from_string(j.at("guarantee").get<std::string>());
    if (j.contains("predicted") && !j.at("predicted").is_null()) {
        const json& pc = j.at("predicted");
        p.predicted = PredictedCoverage{pc.at("mean").get<double>(),
                                        pc.at("q_lo").get<double>(),
                                        pc.at("q_hi").get<double>()};
    }
    if (j.contains("flags")) {
        p.flags = j.at("flags").get<std::vector<std::string>>();
    }
    return p;
}

}  // namespace fedqq
