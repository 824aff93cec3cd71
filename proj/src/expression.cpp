#include "polybell/expression.hpp"

#include <algorithm>
#include <cmath>

namespace polybell {

void BellExpression::validate() const {
    scenario.validate();
    for (const auto& t : joint) {
        if (t.a_set < 1 || t.a_set > scenario.a_settings() || t.b_set < 1 ||
            t.b_set > scenario.b_settings())
            throw std::invalid_argument("joint term setting out of range");
        if (t.a_out < 1 || t.a_out > scenario.a_outcomes[t.a_set - 1] || t.b_out < 1 ||
            t.b_out > scenario.b_outcomes[t.b_set - 1])
            throw std::invalid_argument("joint term outcome out of range");
    }
    for (const auto& t : a_marginal) {
        if (t.setting < 1 || t.setting > scenario.a_settings())
            throw std::invalid_argument("marginal term setting out of range");
        if (t.outcome < 1 || t.outcome > scenario.a_outcomes[t.setting - 1])
            throw std::invalid_argument("marginal term outcome out of range");
        if (t.partner < 1 || t.partner > scenario.b_settings())
            throw std::invalid_argument("marginal partner setting out of range");
    }
    for (const auto& t : b_marginal) {
        if (t.setting < 1 || t.setting > scenario.b_settings())
            throw std::invalid_argument("marginal term setting out of range");
        if (t.outcome < 1 || t.outcome > scenario.b_outcomes[t.setting - 1])
            throw std::invalid_argument("marginal term outcome out of range");
        if (t.partner < 1 || t.partner > scenario.a_settings())
            throw std::invalid_argument("marginal partner setting out of range");
    }
}

BellExpression build_cglmp_iprime(int r) {
    if (r < 1) throw std::invalid_argument("outcome count must be >= 1");
    BellExpression e;
    e.scenario = uniform_scenario(2, r);
    for (int k = 1; k <= r; ++k)
        for (int l = 1; l <= r; ++l) {
            if (k < l) e.joint.push_back({2, 2, k, l, 1.0});
            if (k > l) e.joint.push_back({1, 2, k, l, 1.0});
            if (k < l) e.joint.push_back({1, 1, k, l, 1.0});
            if (k >= l) e.joint.push_back({2, 1, k, l, 1.0});
        }
    return e;
}

namespace {

// 1 - I'(r); nonlocality shows as positive values.
BellExpression one_minus_iprime(int r) {
    BellExpression e = build_cglmp_iprime(r);
    e.constant = 1.0;
    for (auto& t : e.joint) t.coeff = -t.coeff;
    return e;
}

// I_CH = P_11(1,1) + P_12(1,1) + P_21(1,1) - P_22(1,1) - P_A1(1) - P_B1(1)
// on a dichotomic 2x2 scenario; marginal partners fixed to setting 1.
BellExpression build_ch() {
    BellExpression e;
    e.scenario = uniform_scenario(2, 2);
    e.joint = {{1, 1, 1, 1, 1.0}, {1, 2, 1, 1, 1.0}, {2, 1, 1, 1, 1.0}, {2, 2, 1, 1, -1.0}};
    e.a_marginal = {{1, 1, -1.0, 1}};
    e.b_marginal = {{1, 1, -1.0, 1}};
    return e;
}

// The Vertesi-Bene combination: two dichotomic settings per party plus a
// trichotomic third setting for Bob,
//   -xi P_B3(1) - zeta P_B3(2) - upsilon P_A1(1)
//   + P_13(1,1) + P_13(1,2) + P_23(1,1) - P_23(1,2) + c * I_CH.
BellExpression build_vb(double c, double xi, double zeta, double upsilon) {
    BellExpression e;
    e.scenario.a_outcomes = {2, 2};
    e.scenario.b_outcomes = {2, 2, 3};
    e.b_marginal.push_back({3, 1, -xi, 1});
    e.b_marginal.push_back({3, 2, -zeta, 1});
    if (upsilon != 0.0) e.a_marginal.push_back({1, 1, -upsilon, 1});
    e.joint.push_back({1, 3, 1, 1, 1.0});
    e.joint.push_back({1, 3, 1, 2, 1.0});
    e.joint.push_back({2, 3, 1, 1, 1.0});
    e.joint.push_back({2, 3, 1, 2, -1.0});
    // c * I_CH
    e.joint.push_back({1, 1, 1, 1, c});
    e.joint.push_back({1, 2, 1, 1, c});
    e.joint.push_back({2, 1, 1, 1, c});
    e.joint.push_back({2, 2, 1, 1, -c});
    e.a_marginal.push_back({1, 1, -c, 1});
    e.b_marginal.push_back({1, 1, -c, 1});
    return e;
}

}  // namespace

BellExpression build_named(const std::string& name) {
    const double s2 = std::sqrt(2.0);
    if (name == "I3") return one_minus_iprime(3);
    if (name == "I4") return one_minus_iprime(4);
    if (name == "CH") return build_ch();
    if (name == "VB") return build_vb(100.0, 1.0, 1.0 - 1.0 / s2, 0.0);
    if (name == "VBprime") return build_vb(3.52, 2.0 - 1.0 / s2, 1.0 - 1.0 / s2, 2.0 - s2);
    throw std::invalid_argument("unknown expression name: " + name);
}

double evaluate(const BellExpression& expr, const CorrelationTable& table) {
    if (!(expr.scenario == table.scenario()))
        throw std::invalid_argument("expression and table scenarios differ");
    double v = expr.constant;
    for (const auto& t : expr.joint) v += t.coeff * table.p(t.a_set, t.b_set, t.a_out, t.b_out);
    for (const auto& t : expr.a_marginal)
        v += t.coeff * table.a_marginal(t.setting, t.outcome, t.partner);
    for (const auto& t : expr.b_marginal)
        v += t.coeff * table.b_marginal(t.setting, t.outcome, t.partner);
    return v;
}

double evaluate_deterministic(const BellExpression& expr,
                              const std::vector<int>& a_choice,
                              const std::vector<int>& b_choice) {
    double v = expr.constant;
    for (const auto& t : expr.joint)
        if (a_choice[t.a_set - 1] == t.a_out && b_choice[t.b_set - 1] == t.b_out)
            v += t.coeff;
    for (const auto& t : expr.a_marginal)
        if (a_choice[t.setting - 1] == t.outcome) v += t.coeff;
    for (const auto& t : expr.b_marginal)
        if (b_choice[t.setting - 1] == t.outcome) v += t.coeff;
    return v;
}

BellExpression pullback(const BellExpression& expr, const Relabeling& maps,
                        const Scenario& domain_scenario) {
    maps.validate(domain_scenario);
    BellExpression out;
    out.scenario = domain_scenario;
    out.constant = expr.constant;
    auto image_ok = [&](int label, int limit) { return label >= 1 && label <= limit; };

    for (int mu = 1; mu <= domain_scenario.a_settings(); ++mu)
        for (int nu = 1; nu <= domain_scenario.b_settings(); ++nu)
            for (int k = 1; k <= domain_scenario.a_outcomes[mu - 1]; ++k)
                for (int l = 1; l <= domain_scenario.b_outcomes[nu - 1]; ++l) {
                    const int kk = maps.a_maps[mu - 1][k - 1];
                    const int ll = maps.b_maps[nu - 1][l - 1];
                    double c = 0.0;
                    for (const auto& t : expr.joint)
                        if (t.a_set == mu && t.b_set == nu && t.a_out == kk && t.b_out == ll)
                            c += t.coeff;
                    if (c != 0.0 && image_ok(kk, expr.scenario.a_outcomes[mu - 1]) &&
                        image_ok(ll, expr.scenario.b_outcomes[nu - 1]))
                        out.joint.push_back({mu, nu, k, l, c});
                }

    for (const auto& t : expr.a_marginal)
        for (int k = 1; k <= domain_scenario.a_outcomes[t.setting - 1]; ++k)
            if (maps.a_maps[t.setting - 1][k - 1] == t.outcome)
                out.a_marginal.push_back({t.setting, k, t.coeff, t.partner});
    for (const auto& t : expr.b_marginal)
        for (int l = 1; l <= domain_scenario.b_outcomes[t.setting - 1]; ++l)
            if (maps.b_maps[t.setting - 1][l - 1] == t.outcome)
                out.b_marginal.push_back({t.setting, l, t.coeff, t.partner});
    return out;
}

}  // namespace polybell
