#include "polybell/nonsignaling.hpp"

#include <algorithm>
#include <map>

#include "polybell/lp.hpp"

namespace polybell {

namespace {

struct VarIndex {
    // var[(mu-1)*nB + (nu-1)] maps (support position of k, support position of l)
    std::vector<std::vector<int>> var;
    int count = 0;
};

VarIndex index_vars(const Scenario& sc, const OutcomeRestriction& r) {
    VarIndex vi;
    vi.var.resize(static_cast<size_t>(sc.a_settings()) * sc.b_settings());
    for (int mu = 1; mu <= sc.a_settings(); ++mu)
        for (int nu = 1; nu <= sc.b_settings(); ++nu) {
            auto& blk = vi.var[(mu - 1) * sc.b_settings() + (nu - 1)];
            const size_t cells =
                r.a_supports[mu - 1].size() * r.b_supports[nu - 1].size();
            blk.resize(cells);
            for (size_t i = 0; i < cells; ++i) blk[i] = vi.count++;
        }
    return vi;
}

int support_pos(const std::vector<int>& support, int label) {
    auto it = std::lower_bound(support.begin(), support.end(), label);
    if (it == support.end() || *it != label) return -1;
    return static_cast<int>(it - support.begin());
}

}  // namespace

std::pair<double, CorrelationTable> nonsignaling_bound_witness(
    const BellExpression& expr, const std::optional<OutcomeRestriction>& restriction,
    Direction direction) {
    expr.validate();
    const Scenario& sc = expr.scenario;
    const OutcomeRestriction r = restriction.value_or(OutcomeRestriction::full(sc));
    r.validate(sc);

    const VarIndex vi = index_vars(sc, r);
    if (vi.count > 200000)
        throw std::invalid_argument("scenario too large for the dense LP");
    LinearProgram lp(vi.count);

    const double sign = direction == Direction::Max ? 1.0 : -1.0;
    auto var_of = [&](int mu, int nu, int k, int l) -> int {
        const int pk = support_pos(r.a_supports[mu - 1], k);
        const int pl = support_pos(r.b_supports[nu - 1], l);
        if (pk < 0 || pl < 0) return -1;
        return vi.var[(mu - 1) * sc.b_settings() + (nu - 1)]
                     [static_cast<size_t>(pk) * r.b_supports[nu - 1].size() + pl];
    };

    // Objective: joint terms plus marginal terms folded into partner blocks.
    std::map<int, double> obj;
    for (const auto& t : expr.joint) {
        const int v = var_of(t.a_set, t.b_set, t.a_out, t.b_out);
        if (v >= 0) obj[v] += t.coeff;
    }
    for (const auto& t : expr.a_marginal)
        for (int l : r.b_supports[t.partner - 1]) {
            const int v = var_of(t.setting, t.partner, t.outcome, l);
            if (v >= 0) obj[v] += t.coeff;
        }
    for (const auto& t : expr.b_marginal)
        for (int k : r.a_supports[t.partner - 1]) {
            const int v = var_of(t.partner, t.setting, k, t.outcome);
            if (v >= 0) obj[v] += t.coeff;
        }
    for (const auto& [v, c] : obj) lp.set_objective(v, sign * c);

    // Normalization per setting pair.
    for (int mu = 1; mu <= sc.a_settings(); ++mu)
        for (int nu = 1; nu <= sc.b_settings(); ++nu) {
            std::vector<std::pair<int, double>> row;
            for (int k : r.a_supports[mu - 1])
                for (int l : r.b_supports[nu - 1]) row.push_back({var_of(mu, nu, k, l), 1.0});
            lp.add_equality(row, 1.0);
        }

    // Alice marginals independent of nu; Bob marginals independent of mu.
    for (int mu = 1; mu <= sc.a_settings(); ++mu)
        for (int k : r.a_supports[mu - 1])
            for (int nu = 2; nu <= sc.b_settings(); ++nu) {
                std::vector<std::pair<int, double>> row;
                for (int l : r.b_supports[nu - 1]) row.push_back({var_of(mu, nu, k, l), 1.0});
                for (int l : r.b_supports[0]) row.push_back({var_of(mu, 1, k, l), -1.0});
                lp.add_equality(row, 0.0);
            }
    for (int nu = 1; nu <= sc.b_settings(); ++nu)
        for (int l : r.b_supports[nu - 1])
            for (int mu = 2; mu <= sc.a_settings(); ++mu) {
                std::vector<std::pair<int, double>> row;
                for (int k : r.a_supports[mu - 1]) row.push_back({var_of(mu, nu, k, l), 1.0});
                for (int k : r.a_supports[0]) row.push_back({var_of(1, nu, k, l), -1.0});
                lp.add_equality(row, 0.0);
            }

    const auto sol = lp.maximize();

    std::vector<std::vector<double>> blocks;
    for (int mu = 1; mu <= sc.a_settings(); ++mu)
        for (int nu = 1; nu <= sc.b_settings(); ++nu) {
            const int ra = sc.a_outcomes[mu - 1];
            const int rb = sc.b_outcomes[nu - 1];
            std::vector<double> blk(static_cast<size_t>(ra) * rb, 0.0);
            for (int k : r.a_supports[mu - 1])
                for (int l : r.b_supports[nu - 1])
                    blk[static_cast<size_t>(k - 1) * rb + (l - 1)] =
                        std::max(0.0, sol.x[var_of(mu, nu, k, l)]);
            blocks.push_back(std::move(blk));
        }
    auto table = CorrelationTable::from_blocks(sc, std::move(blocks), 1e-7);
    return {sign * sol.value + expr.constant, std::move(table)};
}

double nonsignaling_bound(const BellExpression& expr,
                          const std::optional<OutcomeRestriction>& restriction,
                          Direction direction) {
    return nonsignaling_bound_witness(expr, restriction, direction).first;
}

RestrictedNsBound nonsignaling_bound_over(const BellExpression& expr, int n,
                                          Direction direction) {
    RestrictedNsBound out{0.0, {}};
    const double sign = direction == Direction::Max ? 1.0 : -1.0;
    bool first = true;
    for (const auto& r : enumerate_restrictions(expr.scenario, n)) {
        const double v = nonsignaling_bound(expr, r, direction);
        out.breakdown.push_back({r.key(), v});
        if (first || sign * v > sign * out.value) out.value = v;
        first = false;
    }
    return out;
}

}  // namespace polybell
