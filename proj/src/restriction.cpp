#include "polybell/restriction.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace polybell {

OutcomeRestriction OutcomeRestriction::full(const Scenario& sc) {
    OutcomeRestriction r;
    for (int ra : sc.a_outcomes) {
        std::vector<int> s(ra);
        for (int k = 1; k <= ra; ++k) s[k - 1] = k;
        r.a_supports.push_back(std::move(s));
    }
    for (int rb : sc.b_outcomes) {
        std::vector<int> s(rb);
        for (int k = 1; k <= rb; ++k) s[k - 1] = k;
        r.b_supports.push_back(std::move(s));
    }
    return r;
}

void OutcomeRestriction::validate(const Scenario& sc) const {
    auto check = [](const std::vector<std::vector<int>>& sup, const std::vector<int>& outs) {
        if (sup.size() != outs.size())
            throw std::invalid_argument("restriction must cover every setting");
        for (size_t s = 0; s < sup.size(); ++s) {
            if (sup[s].empty()) throw std::invalid_argument("empty outcome support");
            for (int k : sup[s])
                if (k < 1 || k > outs[s])
                    throw std::invalid_argument("support label out of range");
            if (!std::is_sorted(sup[s].begin(), sup[s].end()) ||
                std::adjacent_find(sup[s].begin(), sup[s].end()) != sup[s].end())
                throw std::invalid_argument("support must be sorted and duplicate-free");
        }
    };
    check(a_supports, sc.a_outcomes);
    check(b_supports, sc.b_outcomes);
}

std::string OutcomeRestriction::key() const {
    std::ostringstream os;
    auto emit = [&os](char tag, const std::vector<std::vector<int>>& sup) {
        for (size_t s = 0; s < sup.size(); ++s) {
            os << tag << s + 1 << ":";
            for (size_t i = 0; i < sup[s].size(); ++i) {
                if (i) os << ",";
                os << sup[s][i];
            }
            os << ";";
        }
    };
    emit('A', a_supports);
    emit('B', b_supports);
    return os.str();
}

OutcomeRestriction restriction_from_key(const Scenario& scenario,
                                        const std::string& key) {
    OutcomeRestriction r;
    r.a_supports.resize(scenario.a_settings());
    r.b_supports.resize(scenario.b_settings());
    size_t pos = 0;
    while (pos < key.size()) {
        const char tag = key[pos];
        const size_t colon = key.find(':', pos);
        const size_t semi = key.find(';', pos);
        if ((tag != 'A' && tag != 'B') || colon == std::string::npos ||
            semi == std::string::npos || colon > semi)
            throw std::invalid_argument("malformed restriction key: " + key);
        const int setting = std::stoi(key.substr(pos + 1, colon - pos - 1));
        std::vector<int> sup;
        size_t p = colon + 1;
        while (p < semi) {
            size_t comma = key.find(',', p);
            if (comma == std::string::npos || comma > semi) comma = semi;
            sup.push_back(std::stoi(key.substr(p, comma - p)));
            p = comma + 1;
        }
        auto& dst = (tag == 'A') ? r.a_supports : r.b_supports;
        if (setting < 1 || setting > static_cast<int>(dst.size()))
            throw std::invalid_argument("restriction key setting out of range: " + key);
        dst[setting - 1] = std::move(sup);
        pos = semi + 1;
    }
    r.validate(scenario);
    return r;
}

namespace {

// All size-k subsets of 1..r in lexicographic order.
std::vector<std::vector<int>> subsets(int r, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i + 1;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == r - (k - 1 - i)) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

}  // namespace

std::vector<OutcomeRestriction> enumerate_restrictions(const Scenario& scenario, int n) {
    scenario.validate();
    if (n < 1) throw std::invalid_argument("restriction size must be >= 1");

    std::vector<std::vector<std::vector<int>>> per_setting;  // choices per setting
    for (int r : scenario.a_outcomes) per_setting.push_back(subsets(r, std::min(n, r)));
    for (int r : scenario.b_outcomes) per_setting.push_back(subsets(r, std::min(n, r)));

    const int n_a = scenario.a_settings();
    const int total = static_cast<int>(per_setting.size());

    std::vector<OutcomeRestriction> out;
    std::vector<size_t> idx(total, 0);
    while (true) {
        OutcomeRestriction r;
        for (int s = 0; s < total; ++s) {
            auto& dst = (s < n_a) ? r.a_supports : r.b_supports;
            dst.push_back(per_setting[s][idx[s]]);
        }
        out.push_back(std::move(r));
        int s = total - 1;
        while (s >= 0 && idx[s] + 1 == per_setting[s].size()) idx[s--] = 0;
        if (s < 0) break;
        ++idx[s];
    }
    return out;
}

namespace {

// Dense coefficient view of an expression, marginals kept separate so that a
// symmetry must preserve them term-for-term.
struct ExprView {
    // joint[a_set-1][b_set-1][(k-1)*rb + (l-1)]
    std::vector<std::vector<std::vector<double>>> joint;
    // marg[pa][setting-1][partner-1][outcome-1]
    std::vector<std::vector<std::vector<double>>> a_marg;
    std::vector<std::vector<std::vector<double>>> b_marg;
};

ExprView make_view(const BellExpression& e) {
    const Scenario& sc = e.scenario;
    ExprView v;
    v.joint.resize(sc.a_settings());
    for (int mu = 1; mu <= sc.a_settings(); ++mu) {
        v.joint[mu - 1].resize(sc.b_settings());
        for (int nu = 1; nu <= sc.b_settings(); ++nu)
            v.joint[mu - 1][nu - 1].assign(
                static_cast<size_t>(sc.a_outcomes[mu - 1]) * sc.b_outcomes[nu - 1], 0.0);
    }
    for (const auto& t : e.joint)
        v.joint[t.a_set - 1][t.b_set - 1]
               [static_cast<size_t>(t.a_out - 1) * sc.b_outcomes[t.b_set - 1] +
                (t.b_out - 1)] += t.coeff;

    v.a_marg.assign(sc.a_settings(),
                    std::vector<std::vector<double>>(sc.b_settings()));
    for (int mu = 0; mu < sc.a_settings(); ++mu)
        for (int nu = 0; nu < sc.b_settings(); ++nu)
            v.a_marg[mu][nu].assign(sc.a_outcomes[mu], 0.0);
    for (const auto& t : e.a_marginal)
        v.a_marg[t.setting - 1][t.partner - 1][t.outcome - 1] += t.coeff;

    v.b_marg.assign(sc.b_settings(),
                    std::vector<std::vector<double>>(sc.a_settings()));
    for (int nu = 0; nu < sc.b_settings(); ++nu)
        for (int mu = 0; mu < sc.a_settings(); ++mu)
            v.b_marg[nu][mu].assign(sc.b_outcomes[nu], 0.0);
    for (const auto& t : e.b_marginal)
        v.b_marg[t.setting - 1][t.partner - 1][t.outcome - 1] += t.coeff;
    return v;
}

constexpr double kCoeffTol = 1e-12;

bool marginal_invariant(const std::vector<std::vector<double>>& marg,
                        const std::vector<int>& perm) {
    for (const auto& partner_slice : marg)
        for (size_t k = 0; k < perm.size(); ++k)
            if (std::abs(partner_slice[perm[k] - 1] - partner_slice[k]) > kCoeffTol)
                return false;
    return true;
}

// coeff(mu,nu, pa(k), pb(l)) must equal coeff(mu,nu, k, l) for all cells.
bool block_invariant(const std::vector<double>& blk, int rb,
                     const std::vector<int>& pa, const std::vector<int>& pb) {
    for (size_t k = 0; k < pa.size(); ++k)
        for (size_t l = 0; l < pb.size(); ++l) {
            const double orig = blk[k * rb + l];
            const double mapped = blk[static_cast<size_t>(pa[k] - 1) * rb + (pb[l] - 1)];
            if (std::abs(orig - mapped) > kCoeffTol) return false;
        }
    return true;
}

}  // namespace

std::vector<ScenarioSymmetry> expression_symmetries(const BellExpression& expr,
                                                    size_t cap) {
    expr.validate();
    const Scenario& sc = expr.scenario;
    const ExprView view = make_view(expr);

    // Candidate permutations per setting, prefiltered by marginal invariance.
    auto candidates = [&](Party p, int setting) {
        const int r = sc.outcomes(p, setting);
        std::vector<int> perm(r);
        for (int k = 0; k < r; ++k) perm[k] = k + 1;
        std::vector<std::vector<int>> cands;
        do {
            const auto& marg = (p == Party::A) ? view.a_marg[setting - 1]
                                               : view.b_marg[setting - 1];
            if (marginal_invariant(marg, perm)) cands.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return cands;
    };

    std::vector<std::vector<std::vector<int>>> a_cands, b_cands;
    for (int mu = 1; mu <= sc.a_settings(); ++mu) a_cands.push_back(candidates(Party::A, mu));
    for (int nu = 1; nu <= sc.b_settings(); ++nu) b_cands.push_back(candidates(Party::B, nu));

    std::vector<ScenarioSymmetry> found;
    ScenarioSymmetry cur;
    cur.a_perms.resize(sc.a_settings());
    cur.b_perms.resize(sc.b_settings());

    // Assign all Alice permutations first, then Bob's; fixing Bob setting nu
    // validates the whole block column (*, nu).
    auto dfs_b = [&](auto&& self, int nu) -> void {
        if (nu > sc.b_settings()) {
            if (found.size() >= cap)
                throw std::runtime_error("expression symmetry group exceeds cap");
            found.push_back(cur);
            return;
        }
        for (const auto& pb : b_cands[nu - 1]) {
            bool ok = true;
            for (int mu = 1; mu <= sc.a_settings() && ok; ++mu)
                ok = block_invariant(view.joint[mu - 1][nu - 1],
                                     sc.b_outcomes[nu - 1], cur.a_perms[mu - 1], pb);
            if (!ok) continue;
            cur.b_perms[nu - 1] = pb;
            self(self, nu + 1);
        }
    };
    auto dfs_a = [&](auto&& self, int mu) -> void {
        if (mu > sc.a_settings()) {
            dfs_b(dfs_b, 1);
            return;
        }
        for (const auto& pa : a_cands[mu - 1]) {
            cur.a_perms[mu - 1] = pa;
            self(self, mu + 1);
        }
    };
    dfs_a(dfs_a, 1);
    return found;
}

std::vector<OutcomeRestriction> dedup_restrictions(
    const std::vector<OutcomeRestriction>& restrictions,
    const std::vector<ScenarioSymmetry>& symmetries) {
    auto apply = [](const OutcomeRestriction& r, const ScenarioSymmetry& g) {
        OutcomeRestriction out = r;
        for (size_t s = 0; s < out.a_supports.size(); ++s) {
            for (int& k : out.a_supports[s]) k = g.a_perms[s][k - 1];
            std::sort(out.a_supports[s].begin(), out.a_supports[s].end());
        }
        for (size_t s = 0; s < out.b_supports.size(); ++s) {
            for (int& k : out.b_supports[s]) k = g.b_perms[s][k - 1];
            std::sort(out.b_supports[s].begin(), out.b_supports[s].end());
        }
        return out;
    };

    std::set<std::string> canonical_seen;
    std::vector<OutcomeRestriction> out;
    for (const auto& r : restrictions) {
        std::string canon = r.key();
        for (const auto& g : symmetries) canon = std::min(canon, apply(r, g).key());
        if (canonical_seen.insert(canon).second) out.push_back(r);
    }
    return out;
}

}  // namespace polybell
