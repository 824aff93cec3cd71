#include "polybell/ncalgebra.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>

#include "polybell/lp.hpp"
#include "polybell/parallel.hpp"

namespace polybell {

std::string Monomial::str() const {
    if (zero) return "0";
    if (word.empty()) return "1";
    std::ostringstream os;
    for (size_t i = 0; i < word.size(); ++i) {
        if (i) os << " ";
        os << (word[i].party == Party::A ? "A" : "B") << word[i].setting << "."
           << word[i].outcome;
    }
    return os.str();
}

namespace {

// Collapses adjacent same-setting letters of one party's segment; same
// outcome is idempotent, different outcomes are orthogonal.
bool reduce_segment(std::vector<Letter>& w) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i + 1 < w.size(); ++i) {
            if (w[i].setting != w[i + 1].setting) continue;
            if (w[i].outcome != w[i + 1].outcome) return false;  // zero
            w.erase(w.begin() + i + 1);
            changed = true;
            break;
        }
    }
    return true;
}

std::string word_key(const std::vector<Letter>& w) {
    std::string key;
    key.reserve(w.size());
    for (const auto& l : w)
        key.push_back(static_cast<char>((l.party == Party::A ? 0 : 1) * 64 +
                                        l.setting * 8 + l.outcome));
    return key;
}

}  // namespace

Monomial canonicalize(const std::vector<Letter>& word) {
    std::vector<Letter> a_part, b_part;
    for (const auto& l : word)
        (l.party == Party::A ? a_part : b_part).push_back(l);
    if (!reduce_segment(a_part) || !reduce_segment(b_part))
        return Monomial::zero_monomial();
    Monomial m;
    m.word = std::move(a_part);
    m.word.insert(m.word.end(), b_part.begin(), b_part.end());
    return m;
}

Monomial adjoint(const Monomial& m) {
    if (m.zero) return m;
    std::vector<Letter> rev(m.word.rbegin(), m.word.rend());
    return canonicalize(rev);
}

Monomial mono_mul(const Monomial& u, const Monomial& v) {
    if (u.zero || v.zero) return Monomial::zero_monomial();
    std::vector<Letter> w = u.word;
    w.insert(w.end(), v.word.begin(), v.word.end());
    return canonicalize(w);
}

LevelSpec LevelSpec::parse(const std::string& text) {
    if (text == "1+AB" || text == "1+ab") return {1, true};
    try {
        size_t pos = 0;
        const int base = std::stoi(text, &pos);
        if (pos == text.size() && base >= 1) return {base, false};
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("bad level spec '" + text + "' (use 1, 2, 3, ... or 1+AB)");
}

std::string LevelSpec::str() const {
    return plus_ab ? std::to_string(base) + "+AB" : std::to_string(base);
}

namespace {

// Retained letters per setting: the restricted support minus its largest
// label (the eliminated outcome).
std::vector<std::vector<Letter>> retained_letters(Party p, const Scenario&,
                                                  const OutcomeRestriction& r) {
    const auto& sup = (p == Party::A) ? r.a_supports : r.b_supports;
    std::vector<std::vector<Letter>> out(sup.size());
    for (size_t s = 0; s < sup.size(); ++s)
        for (size_t i = 0; i + 1 < sup[s].size(); ++i)  // drop the last = largest
            out[s].push_back({p, static_cast<int>(s + 1), sup[s][i]});
    return out;
}

// All reduced words of exact degree d over one party's letters: adjacent
// letters never share a setting.
std::vector<std::vector<Letter>> party_words(
    const std::vector<std::vector<Letter>>& letters, int d) {
    std::vector<std::vector<Letter>> cur{{}};
    for (int step = 0; step < d; ++step) {
        std::vector<std::vector<Letter>> next;
        for (const auto& w : cur)
            for (const auto& per_setting : letters)
                for (const auto& l : per_setting) {
                    if (!w.empty() && w.back().setting == l.setting) continue;
                    auto nw = w;
                    nw.push_back(l);
                    next.push_back(std::move(nw));
                }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

std::vector<Monomial> generate_monomials(const Scenario& scenario,
                                         const OutcomeRestriction& restriction,
                                         const LevelSpec& level) {
    scenario.validate();
    restriction.validate(scenario);

    const auto a_letters = retained_letters(Party::A, scenario, restriction);
    const auto b_letters = retained_letters(Party::B, scenario, restriction);

    std::vector<std::vector<std::vector<Letter>>> a_words, b_words;  // [degree]
    const int max_deg = level.plus_ab ? 1 : level.base;
    for (int d = 0; d <= max_deg; ++d) {
        a_words.push_back(party_words(a_letters, d));
        b_words.push_back(party_words(b_letters, d));
    }

    std::vector<Monomial> out;
    auto emit = [&out](const std::vector<Letter>& wa, const std::vector<Letter>& wb) {
        Monomial m;
        m.word = wa;
        m.word.insert(m.word.end(), wb.begin(), wb.end());
        out.push_back(std::move(m));
    };

    for (int d = 0; d <= max_deg; ++d)
        for (int da = d; da >= 0; --da)
            for (const auto& wa : a_words[da])
                for (const auto& wb : b_words[d - da]) emit(wa, wb);

    if (level.plus_ab)
        for (const auto& wa : a_words[1])
            for (const auto& wb : b_words[1]) emit(wa, wb);

    return out;
}

namespace {

std::string class_key(const Monomial& m) {
    const std::string k = word_key(m.word);
    std::vector<Letter> rev(m.word.rbegin(), m.word.rend());
    const Monomial adj = canonicalize(rev);
    const std::string ka = word_key(adj.word);
    return std::min(k, ka);
}

// Expansion of one outcome operator over the restricted support: outcomes
// outside the support are the zero operator, the largest retained outcome is
// one minus the sum of the others.
std::vector<std::pair<Monomial, double>> operator_expansion(
    Party p, int setting, int outcome, const OutcomeRestriction& r) {
    const auto& sup = r.support(p, setting);
    auto it = std::find(sup.begin(), sup.end(), outcome);
    if (it == sup.end()) return {};
    if (outcome != sup.back()) {
        Monomial m;
        m.word = {{p, setting, outcome}};
        return {{m, 1.0}};
    }
    std::vector<std::pair<Monomial, double>> out{{Monomial::identity(), 1.0}};
    for (size_t i = 0; i + 1 < sup.size(); ++i) {
        Monomial m;
        m.word = {{p, setting, sup[i]}};
        out.push_back({m, -1.0});
    }
    return out;
}

}  // namespace

int MomentSdp::index_of(const Monomial& m) const {
    auto it = class_index.find(class_key(m));
    return it == class_index.end() ? -1 : it->second;
}

MomentSdp build_moment_sdp(const BellExpression& expr,
                           const std::optional<OutcomeRestriction>& restriction,
                           const LevelSpec& level) {
    expr.validate();
    const OutcomeRestriction restr =
        restriction.value_or(OutcomeRestriction::full(expr.scenario));
    restr.validate(expr.scenario);

    MomentSdp sdp;
    sdp.basis = generate_monomials(expr.scenario, restr, level);
    const int n = static_cast<int>(sdp.basis.size());
    sdp.problem.dimension = n;

    auto var_of = [&sdp](const Monomial& m) {
        const std::string key = class_key(m);
        auto it = sdp.class_index.find(key);
        if (it != sdp.class_index.end()) return it->second;
        const int idx = static_cast<int>(sdp.class_reps.size());
        sdp.class_index.emplace(key, idx);
        sdp.class_reps.push_back(m);
        sdp.problem.entries.emplace_back();
        return idx;
    };

    for (int i = 0; i < n; ++i) {
        const Monomial ui = adjoint(sdp.basis[i]);
        for (int j = i; j < n; ++j) {
            const Monomial w = mono_mul(ui, sdp.basis[j]);
            if (w.zero) continue;  // cell fixed to zero by omission
            if (w.is_identity()) {
                sdp.problem.fixed.push_back({i, j, 1.0});
                continue;
            }
            sdp.problem.entries[var_of(w)].push_back({i, j, 1.0});
        }
    }

    // objective: expression rewritten in moments of projector words
    double constant = expr.constant;
    std::map<int, double> coeffs;
    auto add_mono = [&](const Monomial& m, double c) {
        if (c == 0.0) return;
        if (m.is_identity()) {
            constant += c;
            return;
        }
        const int idx = sdp.index_of(m);
        if (idx < 0)
            throw std::logic_error("objective moment missing from matrix: " + m.str());
        coeffs[idx] += c;
    };

    for (const auto& t : expr.joint) {
        const auto ea = operator_expansion(Party::A, t.a_set, t.a_out, restr);
        const auto eb = operator_expansion(Party::B, t.b_set, t.b_out, restr);
        for (const auto& [ma, ca] : ea)
            for (const auto& [mb, cb] : eb) add_mono(mono_mul(ma, mb), t.coeff * ca * cb);
    }
    for (const auto& t : expr.a_marginal)
        for (const auto& [m, c] : operator_expansion(Party::A, t.setting, t.outcome, restr))
            add_mono(m, t.coeff * c);
    for (const auto& t : expr.b_marginal)
        for (const auto& [m, c] : operator_expansion(Party::B, t.setting, t.outcome, restr))
            add_mono(m, t.coeff * c);

    sdp.problem.objective.assign(sdp.problem.entries.size(), 0.0);
    for (const auto& [idx, c] : coeffs) sdp.problem.objective[idx] = c;
    sdp.problem.objective_constant = constant;
    sdp.problem.variable_names.reserve(sdp.class_reps.size());
    for (const auto& rep : sdp.class_reps) sdp.problem.variable_names.push_back(rep.str());
    return sdp;
}

namespace {

BellExpression negated(const BellExpression& e) {
    BellExpression out = e;
    out.constant = -out.constant;
    for (auto& t : out.joint) t.coeff = -t.coeff;
    for (auto& t : out.a_marginal) t.coeff = -t.coeff;
    for (auto& t : out.b_marginal) t.coeff = -t.coeff;
    return out;
}

}  // namespace

RestrictedBound restricted_bound(const BellExpression& expr, int n,
                                 const LevelSpec& level, Direction direction,
                                 const BoundOptions& options) {
    if (n < 1) throw std::invalid_argument("restriction size must be >= 1");
    const BellExpression work = direction == Direction::Max ? expr : negated(expr);
    const double sign = direction == Direction::Max ? 1.0 : -1.0;

    std::vector<OutcomeRestriction> family = enumerate_restrictions(expr.scenario, n);
    RestrictedBound out;
    out.family_size = family.size();
    if (options.dedup) {
        const auto syms = expression_symmetries(work);
        family = dedup_restrictions(family, syms);
    }

    out.breakdown.resize(family.size());
    parallel_for(family.size(), options.jobs, [&](size_t i) {
        const auto sdp = build_moment_sdp(work, family[i], level);
        const SolveResult res = solve(sdp.problem, options.tol);
        out.breakdown[i] = {family[i].key(), sign * res.value, res.status, res.duality_gap};
    });

    std::vector<std::string> failures;
    for (const auto& item : out.breakdown)
        if (item.status != SolveStatus::Optimal && item.status != SolveStatus::NearOptimal)
            failures.push_back(item.restriction);
    if (!failures.empty()) {
        std::ostringstream os;
        os << "sdp solve failed for " << failures.size() << " restriction(s):";
        for (const auto& k : failures) os << " [" << k << "]";
        throw solver_error(os.str());
    }

    bool first = true;
    for (const auto& item : out.breakdown) {
        if (first || sign * item.value > sign * out.value) out.value = item.value;
        first = false;
    }
    return out;
}

}  // namespace polybell
