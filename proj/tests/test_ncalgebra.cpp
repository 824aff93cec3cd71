#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "polybell/local_bound.hpp"
#include "polybell/ncalgebra.hpp"
#include "polybell/quantum_model.hpp"

using namespace polybell;

namespace {

Letter A(int s, int k) { return {Party::A, s, k}; }
Letter B(int s, int k) { return {Party::B, s, k}; }

}  // namespace

TEST_CASE("canonicalize projector words") {
    const auto m = canonicalize({B(1, 1), A(1, 1)});
    REQUIRE(m.word.size() == 2);
    CHECK(m.word[0].party == Party::A);
    CHECK(m.word[1].party == Party::B);

    CHECK(canonicalize({A(1, 1), A(1, 1)}) == canonicalize({A(1, 1)}));
    CHECK(canonicalize({A(1, 1), A(1, 2)}).zero);
    CHECK(canonicalize({A(1, 1), B(2, 1), A(1, 1)}) ==
          canonicalize({A(1, 1), B(2, 1)}));

    // canonicalization is idempotent
    const auto w = canonicalize({A(2, 1), A(1, 1), B(1, 2), A(2, 1)});
    CHECK(canonicalize(w.word) == w);

    // collapses can cascade
    CHECK(canonicalize({A(1, 1), B(1, 1), A(1, 1), B(1, 1)}) ==
          canonicalize({A(1, 1), B(1, 1)}));
}

TEST_CASE("level specs") {
    CHECK(LevelSpec::parse("2") == LevelSpec{2, false});
    CHECK(LevelSpec::parse("1+AB") == LevelSpec{1, true});
    CHECK(LevelSpec::parse("1+AB").str() == "1+AB");
    CHECK_THROWS_AS(LevelSpec::parse("0"), std::invalid_argument);
    CHECK_THROWS_AS(LevelSpec::parse("x"), std::invalid_argument);
}

TEST_CASE("monomial generation counts") {
    const auto chsh = uniform_scenario(2, 2);
    const auto full = OutcomeRestriction::full(chsh);
    CHECK(generate_monomials(chsh, full, LevelSpec::parse("1")).size() == 5);
    CHECK(generate_monomials(chsh, full, LevelSpec::parse("1+AB")).size() == 9);

    // a 3-outcome scenario restricted to 2 outcomes matches a genuine
    // 2-outcome scenario at every level
    const auto sc3 = uniform_scenario(2, 3);
    OutcomeRestriction restr = OutcomeRestriction::full(sc3);
    for (auto& s : restr.a_supports) s = {1, 2};
    for (auto& s : restr.b_supports) s = {2, 3};
    for (const char* lvl : {"1", "1+AB", "2", "3"})
        CHECK(generate_monomials(sc3, restr, LevelSpec::parse(lvl)).size() ==
              generate_monomials(chsh, full, LevelSpec::parse(lvl)).size());
}

TEST_CASE("ch moment relaxation reaches the tsirelson point") {
    const auto ch = build_named("CH");
    const auto sdp = build_moment_sdp(ch, std::nullopt, LevelSpec::parse("1"));
    CHECK(sdp.problem.dimension == 5);
    CHECK(sdp.problem.objective_constant == doctest::Approx(0.0));

    const auto res = solve(sdp.problem, 1e-9);
    REQUIRE(res.status == SolveStatus::Optimal);
    const double tsirelson = (std::sqrt(2.0) - 1.0) / 2.0;
    CHECK(res.value == doctest::Approx(tsirelson).epsilon(1e-7));

    // level 2 cannot be looser
    const auto sdp2 = build_moment_sdp(ch, std::nullopt, LevelSpec::parse("2"));
    const auto res2 = solve(sdp2.problem, 1e-9);
    REQUIRE(res2.status == SolveStatus::Optimal);
    CHECK(res2.value <= res.value + 1e-7);
    CHECK(res2.value == doctest::Approx(tsirelson).epsilon(1e-6));
}

TEST_CASE("moments of an explicit model are feasible and consistent") {
    std::mt19937_64 rng(31);
    const auto i3 = build_named("I3");
    for (int trial = 0; trial < 3; ++trial) {
        std::optional<OutcomeRestriction> restr;
        if (trial == 2) {
            OutcomeRestriction r = OutcomeRestriction::full(i3.scenario);
            for (auto& s : r.a_supports) s = {1, 3};
            for (auto& s : r.b_supports) s = {1, 2};
            restr = r;
        }
        const auto model = random_model(i3.scenario, 3, 3, restr, rng());
        const auto sdp = build_moment_sdp(i3, restr, LevelSpec::parse("2"));

        std::vector<double> y(sdp.class_reps.size());
        for (size_t i = 0; i < y.size(); ++i) y[i] = model_moment(model, sdp.class_reps[i]);

        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(sdp.problem.dimension,
                                                  sdp.problem.dimension);
        for (const auto& c : sdp.problem.fixed) {
            m(c.row, c.col) += c.value;
            if (c.row != c.col) m(c.col, c.row) += c.value;
        }
        for (size_t i = 0; i < sdp.problem.entries.size(); ++i)
            for (const auto& c : sdp.problem.entries[i]) {
                m(c.row, c.col) += y[i] * c.value;
                if (c.row != c.col) m(c.col, c.row) += y[i] * c.value;
            }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-9);
        CHECK(m(0, 0) == doctest::Approx(1.0));

        double obj = sdp.problem.objective_constant;
        for (size_t i = 0; i < y.size(); ++i) obj += sdp.problem.objective[i] * y[i];
        CHECK(obj == doctest::Approx(evaluate(i3, correlations_of(model))).epsilon(1e-8));
    }
}

TEST_CASE("restricted bounds: trivial and boundary cases") {
    const auto i3 = build_named("I3");

    SUBCASE("n covering every setting equals the unrestricted relaxation") {
        const auto direct = solve(
            build_moment_sdp(i3, std::nullopt, LevelSpec::parse("1+AB")).problem, 1e-9);
        const auto over = restricted_bound(i3, 3, LevelSpec::parse("1+AB"),
                                           Direction::Max);
        CHECK(over.breakdown.size() == 1);
        CHECK(over.value == doctest::Approx(direct.value).epsilon(1e-8));
    }

    SUBCASE("n = 1 reproduces the local bound") {
        const auto over = restricted_bound(i3, 1, LevelSpec::parse("1"), Direction::Max);
        CHECK(over.value == doctest::Approx(local_bound(i3, Direction::Max).value)
                                .epsilon(1e-8));
        const auto under = restricted_bound(i3, 1, LevelSpec::parse("1"), Direction::Min);
        CHECK(under.value == doctest::Approx(local_bound(i3, Direction::Min).value)
                                 .epsilon(1e-8));
    }

    SUBCASE("direction min equals the negated max of the negated expression") {
        BellExpression neg = i3;
        neg.constant = -neg.constant;
        for (auto& t : neg.joint) t.coeff = -t.coeff;
        const auto mn = restricted_bound(i3, 2, LevelSpec::parse("1"), Direction::Min);
        const auto mx = restricted_bound(neg, 2, LevelSpec::parse("1"), Direction::Max);
        CHECK(mn.value == doctest::Approx(-mx.value).epsilon(1e-8));
    }
}

TEST_CASE("relabeling the expression and restriction together fixes the bound") {
    const auto i3 = build_named("I3");
    Relabeling perm;
    perm.a_maps = {{3, 1, 2}, {2, 3, 1}};
    perm.b_maps = {{1, 3, 2}, {3, 2, 1}};
    const auto pulled = pullback(i3, perm, i3.scenario);

    OutcomeRestriction r = OutcomeRestriction::full(i3.scenario);
    r.a_supports = {{1, 2}, {2, 3}};
    r.b_supports = {{1, 3}, {1, 2}};
    // the pulled-back expression sees the preimage supports
    OutcomeRestriction pulled_r = r;
    auto preimage = [](const std::vector<int>& map, const std::vector<int>& sup) {
        std::vector<int> out;
        for (int k = 1; k <= static_cast<int>(map.size()); ++k)
            if (std::find(sup.begin(), sup.end(), map[k - 1]) != sup.end())
                out.push_back(k);
        return out;
    };
    for (int s = 0; s < 2; ++s) {
        pulled_r.a_supports[s] = preimage(perm.a_maps[s], r.a_supports[s]);
        pulled_r.b_supports[s] = preimage(perm.b_maps[s], r.b_supports[s]);
    }

    const auto lvl = LevelSpec::parse("1+AB");
    const auto orig = solve(build_moment_sdp(i3, r, lvl).problem, 1e-9);
    const auto moved = solve(build_moment_sdp(pulled, pulled_r, lvl).problem, 1e-9);
    CHECK(orig.value == doctest::Approx(moved.value).epsilon(1e-7));
}

TEST_CASE("level and n monotonicity for I3") {
    const auto i3 = build_named("I3");
    const double l1 =
        solve(build_moment_sdp(i3, std::nullopt, LevelSpec::parse("1")).problem, 1e-8)
            .value;
    const double l1ab =
        solve(build_moment_sdp(i3, std::nullopt, LevelSpec::parse("1+AB")).problem, 1e-8)
            .value;
    const double l2 =
        solve(build_moment_sdp(i3, std::nullopt, LevelSpec::parse("2")).problem, 1e-8)
            .value;
    CHECK(l1ab <= l1 + 1e-7);
    CHECK(l2 <= l1ab + 1e-7);
    CHECK(l1ab == doctest::Approx(0.30495).epsilon(5e-4));

    const double n2 = restricted_bound(i3, 2, LevelSpec::parse("1+AB"), Direction::Max).value;
    CHECK(n2 <= l1ab + 1e-7);
}
