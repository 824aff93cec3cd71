#include <cmath>
#include <random>

#include "doctest.h"
#include "polybell/json_io.hpp"
#include "polybell/ncalgebra.hpp"
#include "polybell/quantum_model.hpp"
#include "polybell/seesaw.hpp"

using namespace polybell;

namespace {

// computational-basis rank-1 projective measurements on dimension r
std::vector<Eigen::MatrixXcd> basis_measurement(int r) {
    std::vector<Eigen::MatrixXcd> effects;
    for (int k = 0; k < r; ++k) {
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(r, r);
        e(k, k) = 1.0;
        effects.push_back(e);
    }
    return effects;
}

}  // namespace

TEST_CASE("correlations of explicit models") {
    SUBCASE("maximally mixed state with rank-1 projective measurements is uniform") {
        const int r = 3;
        QuantumModel m;
        m.dim_a = m.dim_b = r;
        m.state = Eigen::MatrixXcd::Identity(r * r, r * r) / double(r * r);
        m.a_effects = {basis_measurement(r), basis_measurement(r)};
        m.b_effects = {basis_measurement(r), basis_measurement(r)};
        const auto table = correlations_of(m);
        for (int mu = 1; mu <= 2; ++mu)
            for (int nu = 1; nu <= 2; ++nu)
                for (int k = 1; k <= r; ++k)
                    for (int l = 1; l <= r; ++l)
                        CHECK(table.p(mu, nu, k, l) == doctest::Approx(1.0 / 9.0));
    }

    SUBCASE("product eigenstate is deterministic") {
        const int r = 2;
        QuantumModel m;
        m.dim_a = m.dim_b = r;
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(r * r);
        psi(0) = 1.0;  // |1>|1>
        m.state = psi * psi.adjoint();
        m.a_effects = {basis_measurement(r), basis_measurement(r)};
        m.b_effects = {basis_measurement(r), basis_measurement(r)};
        const auto table = correlations_of(m);
        for (int mu = 1; mu <= 2; ++mu)
            for (int nu = 1; nu <= 2; ++nu) CHECK(table.p(mu, nu, 1, 1) == doctest::Approx(1.0));
    }

    SUBCASE("models are always nonsignaling") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 5; ++trial) {
            const auto m = random_model(uniform_scenario(2, 3), 3, 3, std::nullopt, rng());
            CHECK(check_nonsignaling(correlations_of(m), 1e-9).ok);
        }
    }
}

TEST_CASE("random models") {
    const auto sc = uniform_scenario(2, 3);

    SUBCASE("deterministic for a fixed seed") {
        const auto m1 = random_model(sc, 3, 3, std::nullopt, 99);
        const auto m2 = random_model(sc, 3, 3, std::nullopt, 99);
        CHECK((m1.state - m2.state).norm() == 0.0);
        const auto t1 = correlations_of(m1);
        const auto t2 = correlations_of(m2);
        CHECK(t1.p(2, 2, 3, 1) == t2.p(2, 2, 3, 1));
    }

    SUBCASE("invariants hold by construction") {
        for (uint64_t seed : {1ull, 2ull, 3ull})
            CHECK_NOTHROW(random_model(sc, 3, 4, std::nullopt, seed).validate());
    }

    SUBCASE("restriction zeroes the excluded effect") {
        OutcomeRestriction r = OutcomeRestriction::full(sc);
        for (auto& s : r.a_supports) s = {1, 2};
        for (auto& s : r.b_supports) s = {1, 2};
        const auto m = random_model(sc, 3, 3, r, 5);
        CHECK(m.a_effects[0][2].norm() == 0.0);
        CHECK(m.b_effects[1][2].norm() == 0.0);
        CHECK_NOTHROW(m.validate());
    }
}

TEST_CASE("restricted models never use more outcomes than allowed") {
    // kappa accounting: count outcomes with nonzero marginal probability
    const auto sc = uniform_scenario(2, 3);
    OutcomeRestriction r = OutcomeRestriction::full(sc);
    for (auto& s : r.a_supports) s = {1, 3};
    for (auto& s : r.b_supports) s = {2, 3};
    const auto m = random_model(sc, 3, 3, r, 33);
    const auto table = correlations_of(m);
    for (int mu = 1; mu <= 2; ++mu) {
        int used = 0;
        for (int k = 1; k <= 3; ++k) used += table.a_marginal(mu, k, 1) > 1e-12;
        CHECK(used <= 2);
    }
    for (int nu = 1; nu <= 2; ++nu) {
        int used = 0;
        for (int l = 1; l <= 3; ++l) used += table.b_marginal(nu, l, 1) > 1e-12;
        CHECK(used <= 2);
    }
}

TEST_CASE("model json round trip") {
    const auto m = random_model(uniform_scenario(2, 2), 2, 2, std::nullopt, 21);
    const auto m2 = model_from_json(to_json(m));
    CHECK((m.state - m2.state).norm() <= 1e-12);
    CHECK((m.a_effects[1][0] - m2.a_effects[1][0]).norm() <= 1e-12);
}

TEST_CASE("seesaw finds the tsirelson point of CH") {
    const auto ch = build_named("CH");
    SeesawOptions opt;
    opt.restarts = 5;
    opt.seed = 7;
    const auto res = seesaw(ch, 2, 2, std::nullopt, opt);
    CHECK(res.value >= 0.2071 - 1e-4);
    CHECK_NOTHROW(res.model.validate(1e-7));

    // self-consistency contract of the returned value
    CHECK(res.value ==
          doctest::Approx(evaluate(ch, correlations_of(res.model))).epsilon(1e-9));
}

TEST_CASE("seesaw ascent is monotone per step") {
    const auto ch = build_named("CH");
    std::vector<double> trace;
    SeesawOptions opt;
    opt.restarts = 1;
    opt.jobs = 1;
    opt.seed = 3;
    opt.max_iterations = 40;
    opt.step_trace = &trace;
    seesaw(ch, 2, 2, std::nullopt, opt);
    REQUIRE(trace.size() > 4);
    for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-7);
}

TEST_CASE("seesaw respects restrictions and the sandwich property") {
    const auto i3 = build_named("I3");
    OutcomeRestriction r = OutcomeRestriction::full(i3.scenario);
    for (auto& s : r.a_supports) s = {1, 2};
    for (auto& s : r.b_supports) s = {1, 2};

    SeesawOptions opt;
    opt.restarts = 4;
    opt.seed = 11;
    const auto res = seesaw(i3, 3, 3, r, opt);
    CHECK(res.model.a_effects[0][2].norm() == 0.0);

    const auto sdp = build_moment_sdp(i3, r, LevelSpec::parse("2"));
    const auto upper = solve(sdp.problem, 1e-9);
    REQUIRE(upper.usable(1e-9));
    CHECK(res.value <= upper.value + 1e-6);
}
