#include "polybell/analysis.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace polybell {

CountData CountData::zeros(const Scenario& scenario) {
    scenario.validate();
    CountData d;
    d.scenario = scenario;
    for (int ra : scenario.a_outcomes)
        for (int rb : scenario.b_outcomes)
            d.counts.emplace_back(static_cast<size_t>(ra) * rb, 0);
    return d;
}

long long& CountData::at(int a_set, int b_set, int a_out, int b_out) {
    const int rb = scenario.b_outcomes[b_set - 1];
    return counts[(a_set - 1) * scenario.b_settings() + (b_set - 1)]
                 [static_cast<size_t>(a_out - 1) * rb + (b_out - 1)];
}

long long CountData::at(int a_set, int b_set, int a_out, int b_out) const {
    return const_cast<CountData*>(this)->at(a_set, b_set, a_out, b_out);
}

long long CountData::block_total(int a_set, int b_set) const {
    long long total = 0;
    for (long long c : counts[(a_set - 1) * scenario.b_settings() + (b_set - 1)])
        total += c;
    return total;
}

CountData parse_counts_csv(std::istream& in, const Scenario& scenario) {
    CountData data = CountData::zeros(scenario);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.find("a_setting") != std::string::npos) continue;  // header
        }
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 5)
            throw std::invalid_argument("counts row needs 5 fields: " + line);
        const int mu = std::stoi(fields[0]), nu = std::stoi(fields[1]);
        const int k = std::stoi(fields[2]), l = std::stoi(fields[3]);
        const long long c = std::stoll(fields[4]);
        if (c < 0) throw std::invalid_argument("negative count");
        if (mu < 1 || mu > scenario.a_settings() || nu < 1 || nu > scenario.b_settings() ||
            k < 1 || k > scenario.a_outcomes[mu - 1] || l < 1 ||
            l > scenario.b_outcomes[nu - 1])
            throw std::invalid_argument("counts row out of range: " + line);
        data.at(mu, nu, k, l) += c;
    }
    return data;
}

CountData load_counts_csv(const std::string& path, const Scenario& scenario) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open counts file: " + path);
    return parse_counts_csv(in, scenario);
}

CorrelationTable white_noise_correlations(const QuantumModel& model) {
    QuantumModel noisy = model;
    const long d = static_cast<long>(model.dim_a) * model.dim_b;
    noisy.state = Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
    return correlations_of(noisy);
}

VisibilityReport visibility_threshold(const BellExpression& expr,
                                      const CorrelationTable& target,
                                      const CorrelationTable& white, double bound,
                                      const std::string& bound_name) {
    const double tv = evaluate(expr, target);
    const double wv = evaluate(expr, white);
    if (std::abs(tv - wv) < 1e-12)
        throw std::invalid_argument("target and white-noise values coincide");

    VisibilityReport rep;
    rep.bound_name = bound_name;
    rep.bound = bound;
    rep.target_value = tv;
    rep.white_value = wv;
    rep.exceeds = tv > wv;
    rep.threshold = (bound - wv) / (tv - wv);
    // the mixture only crosses the bound for a weight inside [0,1]
    if (rep.threshold > 1.0 + 1e-9 || rep.threshold < -1e-9)
        throw no_violation_possible("target does not beat the bound");
    rep.threshold = std::min(1.0, std::max(0.0, rep.threshold));
    return rep;
}

CountEvaluation evaluate_counts(const BellExpression& expr, const CountData& data) {
    expr.validate();
    if (!(expr.scenario == data.scenario))
        throw std::invalid_argument("expression and counts scenarios differ");
    const Scenario& sc = expr.scenario;

    // net coefficient per block cell, marginals folded into partner blocks
    std::map<std::pair<int, int>, std::vector<double>> net;
    auto block_coeffs = [&](int mu, int nu) -> std::vector<double>& {
        auto it = net.find({mu, nu});
        if (it == net.end())
            it = net.emplace(std::pair<int, int>{mu, nu},
                             std::vector<double>(
                                 static_cast<size_t>(sc.a_outcomes[mu - 1]) *
                                     sc.b_outcomes[nu - 1],
                                 0.0))
                     .first;
        return it->second;
    };
    for (const auto& t : expr.joint)
        block_coeffs(t.a_set, t.b_set)[static_cast<size_t>(t.a_out - 1) *
                                           sc.b_outcomes[t.b_set - 1] +
                                       (t.b_out - 1)] += t.coeff;
    for (const auto& t : expr.a_marginal) {
        auto& blk = block_coeffs(t.setting, t.partner);
        const int rb = sc.b_outcomes[t.partner - 1];
        for (int l = 1; l <= rb; ++l)
            blk[static_cast<size_t>(t.outcome - 1) * rb + (l - 1)] += t.coeff;
    }
    for (const auto& t : expr.b_marginal) {
        auto& blk = block_coeffs(t.partner, t.setting);
        const int rb = sc.b_outcomes[t.setting - 1];
        for (int k = 1; k <= sc.a_outcomes[t.partner - 1]; ++k)
            blk[static_cast<size_t>(k - 1) * rb + (t.outcome - 1)] += t.coeff;
    }

    CountEvaluation out{expr.constant, 0.0, 0};
    double variance = 0.0;
    for (const auto& [block, coeffs] : net) {
        const auto [mu, nu] = block;
        const long long total = data.block_total(mu, nu);
        bool used = false;
        for (double c : coeffs) used = used || c != 0.0;
        if (!used) continue;
        if (total <= 0)
            throw insufficient_data("no events for setting pair (" +
                                    std::to_string(mu) + "," + std::to_string(nu) + ")");
        out.total_events += total;

        const auto& cblk = data.counts[(mu - 1) * sc.b_settings() + (nu - 1)];
        double mean = 0.0, second = 0.0;
        for (size_t i = 0; i < coeffs.size(); ++i) {
            const double phat = static_cast<double>(cblk[i]) / total;
            mean += coeffs[i] * phat;
            second += coeffs[i] * coeffs[i] * phat;
        }
        out.value += mean;
        variance += (second - mean * mean) / total;
    }
    out.sigma = std::sqrt(std::max(0.0, variance));
    return out;
}

}  // namespace polybell
