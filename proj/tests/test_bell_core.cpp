#include <cmath>
#include <random>

#include "doctest.h"
#include "polybell/correlation.hpp"
#include "polybell/expression.hpp"
#include "polybell/json_io.hpp"
#include "test_util.hpp"

using namespace polybell;

namespace {

double joint_coeff(const BellExpression& e, int mu, int nu, int k, int l) {
    double c = 0.0;
    for (const auto& t : e.joint)
        if (t.a_set == mu && t.b_set == nu && t.a_out == k && t.b_out == l) c += t.coeff;
    return c;
}

CorrelationTable all_ones(const Scenario& sc) {
    return CorrelationTable::deterministic(sc, std::vector<int>(sc.a_settings(), 1),
                                           std::vector<int>(sc.b_settings(), 1));
}

}  // namespace

TEST_CASE("cglmp iprime term counts") {
    CHECK(build_cglmp_iprime(3).joint.size() == 15);  // 3+3+3+6
    CHECK(build_cglmp_iprime(2).joint.size() == 6);   // 1+1+1+3

    const auto i1 = build_cglmp_iprime(1);
    REQUIRE(i1.joint.size() == 1);
    CHECK(i1.joint[0].a_set == 2);
    CHECK(i1.joint[0].b_set == 1);
    CHECK(i1.joint[0].coeff == 1.0);

    CHECK_THROWS_AS(build_cglmp_iprime(0), std::invalid_argument);
}

TEST_CASE("named expressions") {
    const auto vb = build_named("VB");
    CHECK(joint_coeff(vb, 2, 2, 1, 1) == doctest::Approx(-100.0));
    CHECK(vb.scenario.a_outcomes == std::vector<int>{2, 2});
    CHECK(vb.scenario.b_outcomes == std::vector<int>{2, 2, 3});

    const auto vbp = build_named("VBprime");
    double zeta_coeff = 0.0;
    for (const auto& t : vbp.b_marginal)
        if (t.setting == 3 && t.outcome == 2) zeta_coeff += t.coeff;
    CHECK(zeta_coeff == doctest::Approx(-(1.0 - 1.0 / std::sqrt(2.0))).epsilon(1e-12));

    const auto i3 = build_named("I3");
    CHECK(evaluate(i3, CorrelationTable::uniform(i3.scenario)) ==
          doctest::Approx(-2.0 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(build_named("nope"), std::invalid_argument);
}

TEST_CASE("evaluate on basic tables") {
    const auto ip = build_cglmp_iprime(3);
    CHECK(evaluate(ip, all_ones(ip.scenario)) == doctest::Approx(1.0));
    CHECK(evaluate(ip, CorrelationTable::uniform(ip.scenario)) ==
          doctest::Approx(5.0 / 3.0));

    const auto ch = build_named("CH");
    CHECK(evaluate(ch, all_ones(ch.scenario)) == doctest::Approx(0.0));

    // scenario mismatch
    const auto i4 = build_named("I4");
    CHECK_THROWS_AS(evaluate(i4, CorrelationTable::uniform(ip.scenario)),
                    std::invalid_argument);
}

TEST_CASE("evaluate is affine in the table") {
    std::mt19937_64 rng(11);
    const auto expr = build_named("I3");
    const auto p = testutil::random_local_table(expr.scenario, rng);
    const auto q = testutil::random_local_table(expr.scenario, rng);
    for (double alpha : {0.0, 0.25, 0.7, 1.0}) {
        const auto m = testutil::mix({&p, &q}, {alpha, 1.0 - alpha});
        CHECK(evaluate(expr, m) ==
              doctest::Approx(alpha * evaluate(expr, p) + (1 - alpha) * evaluate(expr, q))
                  .epsilon(1e-10));
    }
}

TEST_CASE("merge outcomes") {
    const auto sc = uniform_scenario(2, 3);
    const auto merged = merge_outcomes(CorrelationTable::uniform(sc), MergeParty::Both, 3, 1);
    CHECK(merged.scenario().a_outcomes == std::vector<int>{2, 2});
    for (int mu = 1; mu <= 2; ++mu)
        for (int nu = 1; nu <= 2; ++nu) {
            CHECK(merged.p(mu, nu, 1, 1) == doctest::Approx(4.0 / 9.0));
            CHECK(merged.p(mu, nu, 1, 2) == doctest::Approx(2.0 / 9.0));
            CHECK(merged.p(mu, nu, 2, 1) == doctest::Approx(2.0 / 9.0));
            CHECK(merged.p(mu, nu, 2, 2) == doctest::Approx(1.0 / 9.0));
        }

    std::mt19937_64 rng(5);
    const auto table = testutil::random_local_table(sc, rng);
    const auto m2 = merge_outcomes(table, MergeParty::A, 2, 1);
    for (int mu = 1; mu <= 2; ++mu)
        for (int nu = 1; nu <= 2; ++nu) {
            double sum = 0.0;
            for (int k = 1; k <= 2; ++k)
                for (int l = 1; l <= 3; ++l) sum += m2.p(mu, nu, k, l);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
        }

    CHECK_THROWS_AS(merge_outcomes(table, MergeParty::Both, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(merge_outcomes(table, MergeParty::Both, 2, 2), std::invalid_argument);
}

TEST_CASE("relabel") {
    const auto sc = uniform_scenario(2, 2);
    const auto det = all_ones(sc);

    SUBCASE("identity is a no-op") {
        const auto out = relabel(det, Relabeling::identity(sc));
        CHECK(out.p(1, 1, 1, 1) == doctest::Approx(1.0));
        CHECK(out.scenario() == sc);
    }
    SUBCASE("swap moves the deterministic point") {
        Relabeling swap;
        swap.a_maps = {{2, 1}, {2, 1}};
        swap.b_maps = {{2, 1}, {2, 1}};
        const auto out = relabel(det, swap);
        for (int mu = 1; mu <= 2; ++mu)
            for (int nu = 1; nu <= 2; ++nu) CHECK(out.p(mu, nu, 2, 2) == doctest::Approx(1.0));
    }
    SUBCASE("constant map collects all mass") {
        std::mt19937_64 rng(3);
        const auto table = testutil::random_local_table(sc, rng);
        Relabeling constant;
        constant.a_maps = {{1, 1}, {1, 1}};
        constant.b_maps = {{1, 1}, {1, 1}};
        const auto out = relabel(table, constant);
        CHECK(out.scenario().a_outcomes == std::vector<int>{1, 1});
        CHECK(out.p(1, 1, 1, 1) == doctest::Approx(1.0));
    }
    SUBCASE("permutation then inverse is the identity") {
        std::mt19937_64 rng(7);
        const auto sc3 = uniform_scenario(2, 3);
        const auto table = testutil::random_local_table(sc3, rng);
        Relabeling perm, inv;
        perm.a_maps = {{2, 3, 1}, {1, 3, 2}};
        perm.b_maps = {{3, 1, 2}, {2, 1, 3}};
        auto invert = [](const std::vector<int>& p) {
            std::vector<int> q(p.size());
            for (size_t i = 0; i < p.size(); ++i) q[p[i] - 1] = static_cast<int>(i + 1);
            return q;
        };
        for (const auto& m : perm.a_maps) inv.a_maps.push_back(invert(m));
        for (const auto& m : perm.b_maps) inv.b_maps.push_back(invert(m));
        const auto round = relabel(relabel(table, perm), inv);
        for (int mu = 1; mu <= 2; ++mu)
            for (int nu = 1; nu <= 2; ++nu)
                for (int k = 1; k <= 3; ++k)
                    for (int l = 1; l <= 3; ++l)
                        CHECK(round.p(mu, nu, k, l) ==
                              doctest::Approx(table.p(mu, nu, k, l)).epsilon(1e-12));
    }
    SUBCASE("undefined labels are rejected") {
        Relabeling bad;
        bad.a_maps = {{1}, {1, 2}};  // first map too short for r = 2
        bad.b_maps = {{1, 2}, {1, 2}};
        CHECK_THROWS_AS(relabel(det, bad), std::invalid_argument);
    }
}

TEST_CASE("nonsignaling check") {
    const auto sc = uniform_scenario(2, 2);
    CHECK(check_nonsignaling(CorrelationTable::uniform(sc)).ok);

    std::mt19937_64 rng(9);
    CHECK(check_nonsignaling(testutil::random_local_table(sc, rng)).ok);

    // signaling: Alice's marginal depends on Bob's setting
    std::vector<std::vector<double>> blocks(4, std::vector<double>(4, 0.0));
    blocks[0][0] = 1.0;  // (1,1): mass on (1,1)
    blocks[1][3] = 1.0;  // (1,2): mass on (2,2)
    blocks[2][0] = 1.0;
    blocks[3][0] = 1.0;
    const auto bad = CorrelationTable::from_blocks(sc, std::move(blocks));
    const auto chk = check_nonsignaling(bad);
    CHECK_FALSE(chk.ok);
    CHECK(chk.worst_deviation == doctest::Approx(1.0));
}

TEST_CASE("appendix chain inequality on random nonsignaling tables") {
    std::mt19937_64 rng(2024);
    for (int r : {3, 4}) {
        const auto sc = uniform_scenario(2, r);
        const auto ip = build_cglmp_iprime(r);
        const auto ip_small = build_cglmp_iprime(r - 1);
        testutil::NsTableSource source(sc, rng, 12, 4);
        for (int trial = 0; trial < 250; ++trial) {
            const auto p = source.draw(rng);
            const auto merged = merge_outcomes(p, MergeParty::Both, r, 1);
            double a2 = 0, b2 = 0, a1 = 0, b1 = 0;
            for (int l = 1; l <= r; ++l) a2 += p.p(2, 2, r, l);
            for (int k = 1; k <= r; ++k) b2 += p.p(2, 2, k, r);
            for (int l = 1; l <= r; ++l) a1 += p.p(1, 2, r, l);
            for (int k = 1; k <= r; ++k) b1 += p.p(1, 1, k, r);
            const double lhs = evaluate(ip, p);
            const double rhs = evaluate(ip_small, merged) - a2 - b2 - a1 - b1;
            CHECK(lhs >= rhs - 1e-9);
        }
    }
}

TEST_CASE("iprime pieces are nonnegative and r=1 is constant") {
    std::mt19937_64 rng(77);
    const auto sc = uniform_scenario(2, 3);
    testutil::NsTableSource source(sc, rng, 8, 3);
    const auto ip = build_cglmp_iprime(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = source.draw(rng);
        for (const auto& t : ip.joint)
            CHECK(t.coeff * p.p(t.a_set, t.b_set, t.a_out, t.b_out) >= -1e-15);
        CHECK(evaluate(ip, p) >= -1e-12);
    }

    const auto ip1 = build_cglmp_iprime(1);
    const auto sc1 = uniform_scenario(2, 1);
    CHECK(evaluate(ip1, CorrelationTable::uniform(sc1)) == doctest::Approx(1.0));
}

TEST_CASE("json round trips") {
    const auto vbp = build_named("VBprime");
    const auto expr2 = expression_from_json(to_json(vbp));
    CHECK(expr2.scenario == vbp.scenario);
    CHECK(expr2.joint.size() == vbp.joint.size());
    CHECK(joint_coeff(expr2, 2, 2, 1, 1) == doctest::Approx(-3.52));

    std::mt19937_64 rng(13);
    const auto table = testutil::random_local_table(vbp.scenario, rng);
    const auto table2 = table_from_json(to_json(table));
    CHECK(evaluate(vbp, table) == doctest::Approx(evaluate(vbp, table2)).epsilon(1e-12));

    const auto sc = scenario_from_json(to_json(vbp.scenario));
    CHECK(sc == vbp.scenario);
}
