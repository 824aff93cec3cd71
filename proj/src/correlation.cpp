#include "polybell/correlation.hpp"

#include <algorithm>
#include <cmath>

namespace polybell {

namespace {
constexpr double kNegativeClamp = -1e-12;
}

CorrelationTable CorrelationTable::from_blocks(Scenario scenario,
                                               std::vector<std::vector<double>> blocks,
                                               double norm_tol) {
    scenario.validate();
    const size_t n_pairs =
        static_cast<size_t>(scenario.a_settings()) * scenario.b_settings();
    if (blocks.size() != n_pairs)
        throw std::invalid_argument("wrong number of setting-pair blocks");

    for (int mu = 1; mu <= scenario.a_settings(); ++mu) {
        for (int nu = 1; nu <= scenario.b_settings(); ++nu) {
            auto& blk = blocks[(mu - 1) * scenario.b_settings() + (nu - 1)];
            const size_t want = static_cast<size_t>(scenario.a_outcomes[mu - 1]) *
                                scenario.b_outcomes[nu - 1];
            if (blk.size() != want)
                throw std::invalid_argument("block size does not match outcome counts");
            double sum = 0.0;
            for (double& v : blk) {
                if (v < 0.0) {
                    if (v < kNegativeClamp)
                        throw std::invalid_argument("negative probability entry");
                    v = 0.0;
                }
                sum += v;
            }
            if (std::abs(sum - 1.0) > norm_tol)
                throw std::invalid_argument("setting-pair block is not normalized");
        }
    }
    return CorrelationTable(std::move(scenario), std::move(blocks));
}

CorrelationTable CorrelationTable::uniform(const Scenario& scenario) {
    std::vector<std::vector<double>> blocks;
    for (int ra : scenario.a_outcomes)
        for (int rb : scenario.b_outcomes)
            blocks.emplace_back(static_cast<size_t>(ra) * rb, 1.0 / (ra * rb));
    return from_blocks(scenario, std::move(blocks));
}

CorrelationTable CorrelationTable::deterministic(const Scenario& scenario,
                                                 const std::vector<int>& a_choice,
                                                 const std::vector<int>& b_choice) {
    if (static_cast<int>(a_choice.size()) != scenario.a_settings() ||
        static_cast<int>(b_choice.size()) != scenario.b_settings())
        throw std::invalid_argument("strategy must pick one outcome per setting");
    std::vector<std::vector<double>> blocks;
    for (int mu = 1; mu <= scenario.a_settings(); ++mu) {
        const int ra = scenario.a_outcomes[mu - 1];
        const int k = a_choice[mu - 1];
        if (k < 1 || k > ra) throw std::invalid_argument("strategy outcome out of range");
        for (int nu = 1; nu <= scenario.b_settings(); ++nu) {
            const int rb = scenario.b_outcomes[nu - 1];
            const int l = b_choice[nu - 1];
            if (l < 1 || l > rb)
                throw std::invalid_argument("strategy outcome out of range");
            std::vector<double> blk(static_cast<size_t>(ra) * rb, 0.0);
            blk[static_cast<size_t>(k - 1) * rb + (l - 1)] = 1.0;
            blocks.push_back(std::move(blk));
        }
    }
    return from_blocks(scenario, std::move(blocks));
}

int CorrelationTable::block_index(int a_set, int b_set) const {
    if (a_set < 1 || a_set > scenario_.a_settings() || b_set < 1 ||
        b_set > scenario_.b_settings())
        throw std::invalid_argument("setting index out of range");
    return (a_set - 1) * scenario_.b_settings() + (b_set - 1);
}

const std::vector<double>& CorrelationTable::block(int a_set, int b_set) const {
    return blocks_[block_index(a_set, b_set)];
}

double CorrelationTable::p(int a_set, int b_set, int a_out, int b_out) const {
    const int ra = scenario_.a_outcomes[a_set - 1];
    const int rb = scenario_.b_outcomes[b_set - 1];
    if (a_out < 1 || a_out > ra || b_out < 1 || b_out > rb)
        throw std::invalid_argument("outcome index out of range");
    return blocks_[block_index(a_set, b_set)]
                  [static_cast<size_t>(a_out - 1) * rb + (b_out - 1)];
}

double CorrelationTable::a_marginal(int a_set, int a_out, int partner_b_set) const {
    const int rb = scenario_.b_outcomes[partner_b_set - 1];
    double sum = 0.0;
    for (int l = 1; l <= rb; ++l) sum += p(a_set, partner_b_set, a_out, l);
    return sum;
}

double CorrelationTable::b_marginal(int b_set, int b_out, int partner_a_set) const {
    const int ra = scenario_.a_outcomes[partner_a_set - 1];
    double sum = 0.0;
    for (int k = 1; k <= ra; ++k) sum += p(partner_a_set, b_set, k, b_out);
    return sum;
}

CorrelationTable relabel(const CorrelationTable& table, const Relabeling& maps) {
    const Scenario& sc = table.scenario();
    maps.validate(sc);

    Scenario out;
    for (const auto& m : maps.a_maps)
        out.a_outcomes.push_back(*std::max_element(m.begin(), m.end()));
    for (const auto& m : maps.b_maps)
        out.b_outcomes.push_back(*std::max_element(m.begin(), m.end()));

    std::vector<std::vector<double>> blocks;
    for (int mu = 1; mu <= sc.a_settings(); ++mu) {
        const int ra = sc.a_outcomes[mu - 1];
        const int ra_out = out.a_outcomes[mu - 1];
        for (int nu = 1; nu <= sc.b_settings(); ++nu) {
            const int rb = sc.b_outcomes[nu - 1];
            const int rb_out = out.b_outcomes[nu - 1];
            std::vector<double> blk(static_cast<size_t>(ra_out) * rb_out, 0.0);
            for (int k = 1; k <= ra; ++k) {
                const int kk = maps.a_maps[mu - 1][k - 1];
                for (int l = 1; l <= rb; ++l) {
                    const int ll = maps.b_maps[nu - 1][l - 1];
                    blk[static_cast<size_t>(kk - 1) * rb_out + (ll - 1)] +=
                        table.p(mu, nu, k, l);
                }
            }
            blocks.push_back(std::move(blk));
        }
    }
    return CorrelationTable::from_blocks(std::move(out), std::move(blocks));
}

CorrelationTable merge_outcomes(const CorrelationTable& table, MergeParty party,
                                int from, int into) {
    if (from == into) throw std::invalid_argument("merge needs two distinct labels");
    if (from < 1 || into < 1) throw std::invalid_argument("labels are 1-based");

    const Scenario& sc = table.scenario();
    auto build_maps = [&](const std::vector<int>& outs, bool active) {
        std::vector<std::vector<int>> maps;
        for (int r : outs) {
            std::vector<int> m(r);
            const bool applies = active && from <= r && into <= r;
            for (int k = 1; k <= r; ++k) {
                int target = (applies && k == from) ? into : k;
                // removing `from` leaves a gap; compact the labels above it
                if (applies && target > from) --target;
                m[k - 1] = target;
            }
            maps.push_back(std::move(m));
        }
        return maps;
    };

    const bool on_a = party == MergeParty::A || party == MergeParty::Both;
    const bool on_b = party == MergeParty::B || party == MergeParty::Both;

    bool any = false;
    if (on_a)
        for (int r : sc.a_outcomes) any = any || (from <= r && into <= r);
    if (on_b)
        for (int r : sc.b_outcomes) any = any || (from <= r && into <= r);
    if (!any) throw std::invalid_argument("merge labels out of range for every setting");

    Relabeling rl;
    rl.a_maps = build_maps(sc.a_outcomes, on_a);
    rl.b_maps = build_maps(sc.b_outcomes, on_b);
    return relabel(table, rl);
}

NonsignalingCheck check_nonsignaling(const CorrelationTable& table, double tol) {
    const Scenario& sc = table.scenario();
    double worst = 0.0;
    for (int mu = 1; mu <= sc.a_settings(); ++mu)
        for (int k = 1; k <= sc.a_outcomes[mu - 1]; ++k) {
            const double ref = table.a_marginal(mu, k, 1);
            for (int nu = 2; nu <= sc.b_settings(); ++nu)
                worst = std::max(worst, std::abs(table.a_marginal(mu, k, nu) - ref));
        }
    for (int nu = 1; nu <= sc.b_settings(); ++nu)
        for (int l = 1; l <= sc.b_outcomes[nu - 1]; ++l) {
            const double ref = table.b_marginal(nu, l, 1);
            for (int mu = 2; mu <= sc.a_settings(); ++mu)
                worst = std::max(worst, std::abs(table.b_marginal(nu, l, mu) - ref));
        }
    return {worst <= tol, worst};
}

}  // namespace polybell
