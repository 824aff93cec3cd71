#include <cmath>
#include <cstdlib>
#include <random>

#include "doctest.h"
#include "polybell/json_io.hpp"
#include "polybell/lp.hpp"
#include "polybell/sdp_solver.hpp"
#include "polybell/seesaw.hpp"

using namespace polybell;

TEST_CASE("trivial cone boundary") {
    // maximize -x subject to [x] psd
    SdpProblem p;
    p.dimension = 1;
    p.entries = {{{0, 0, 1.0}}};
    p.objective = {-1.0};
    const auto res = solve(p, 1e-9);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(res.duality_gap <= 1e-6);
}

TEST_CASE("correlation matrix extreme") {
    // maximize m subject to [[1, m], [m, 1]] psd
    SdpProblem p;
    p.dimension = 2;
    p.fixed = {{0, 0, 1.0}, {1, 1, 1.0}};
    p.entries = {{{0, 1, 1.0}}};
    p.objective = {1.0};
    const auto res = solve(p, 1e-9);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(res.matrix(0, 1) == doctest::Approx(1.0).epsilon(1e-6));

    // psd certificate of the reported matrix
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.matrix, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
}

namespace {

// Random diagonal SDP: the matrix is diag(b_r + sum_i A_ri y_i), so the
// problem is an LP solvable independently with the simplex code.
struct DiagonalProblem {
    SdpProblem sdp;
    int rows, vars;
    std::vector<std::vector<double>> a;  // rows x vars
    std::vector<double> b;
    std::vector<double> c;
};

DiagonalProblem random_diagonal(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nrows(2, 5), nvars(1, 3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DiagonalProblem d;
    d.rows = nrows(rng);
    d.vars = nvars(rng);
    d.a.assign(d.rows, std::vector<double>(d.vars, 0.0));
    d.b.assign(d.rows, 0.0);
    d.c.assign(d.vars, 0.0);
    d.sdp.dimension = d.rows;
    d.sdp.entries.resize(d.vars);
    for (int r = 0; r < d.rows; ++r) {
        d.b[r] = std::abs(gauss(rng)) + 0.5;  // keep y = 0 strictly feasible
        d.sdp.fixed.push_back({r, r, d.b[r]});
        for (int v = 0; v < d.vars; ++v) {
            d.a[r][v] = gauss(rng);
            if (d.a[r][v] != 0.0) d.sdp.entries[v].push_back({r, r, d.a[r][v]});
        }
    }
    for (int v = 0; v < d.vars; ++v) {
        d.c[v] = gauss(rng);
        d.sdp.objective.push_back(d.c[v]);
    }
    // box rows keep the LP bounded
    for (int v = 0; v < d.vars; ++v) {
        d.a.push_back(std::vector<double>(d.vars, 0.0));
        d.a.back()[v] = -1.0;
        d.b.push_back(10.0);
        d.sdp.fixed.push_back({d.rows, d.rows, 10.0});
        d.sdp.entries[v].push_back({d.rows, d.rows, -1.0});
        ++d.rows;
        ++d.sdp.dimension;
        d.a.push_back(std::vector<double>(d.vars, 0.0));
        d.a.back()[v] = 1.0;
        d.b.push_back(10.0);
        d.sdp.fixed.push_back({d.rows, d.rows, 10.0});
        d.sdp.entries[v].push_back({d.rows, d.rows, 1.0});
        ++d.rows;
        ++d.sdp.dimension;
    }
    return d;
}

// maximize c.y s.t. b + A y >= 0 via the equality-form simplex: y = u - v,
// slack s: A(u - v) + s = ... -> -A u + A v - s = b - ... sign care below.
double lp_reference(const DiagonalProblem& d) {
    // variables: u (vars), v (vars), s (rows), all >= 0
    const int n = 2 * d.vars + d.rows;
    LinearProgram lp(n);
    for (int j = 0; j < d.vars; ++j) {
        lp.set_objective(j, d.c[j]);
        lp.set_objective(d.vars + j, -d.c[j]);
    }
    for (int r = 0; r < d.rows; ++r) {
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < d.vars; ++j) {
            row.push_back({j, d.a[r][j]});
            row.push_back({d.vars + j, -d.a[r][j]});
        }
        row.push_back({2 * d.vars + r, -1.0});  // A y - s = -b  =>  b + A y = s >= 0
        lp.add_equality(row, -d.b[r]);
    }
    return lp.maximize().value;
}

}  // namespace

TEST_CASE("diagonal sdp agrees with the simplex on random instances") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        const auto d = random_diagonal(rng);
        const double ref = lp_reference(d);
        const auto res = solve(d.sdp, 1e-9);
        REQUIRE(res.usable(1e-9));
        CHECK(res.value == doctest::Approx(ref).epsilon(5e-6));

        // negation duality: max(-c) = -min(c)
        SdpProblem neg = d.sdp;
        for (auto& c : neg.objective) c = -c;
        DiagonalProblem dneg = d;
        for (auto& c : dneg.c) c = -c;
        const auto res_neg = solve(neg, 1e-9);
        REQUIRE(res_neg.usable(1e-9));
        CHECK(res_neg.value == doctest::Approx(lp_reference(dneg)).epsilon(5e-6));
    }
}

TEST_CASE("equality presolve") {
    // maximize m subject to [[1, m],[m, z]] psd, z = 1/4  ->  m = 1/2
    SdpProblem p;
    p.dimension = 2;
    p.fixed = {{0, 0, 1.0}};
    p.entries = {{{0, 1, 1.0}}, {{1, 1, 1.0}}};
    p.objective = {1.0, 0.0};
    p.equalities.push_back({{{1, 1.0}}, 0.25});
    const auto res = solve(p, 1e-9);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(res.variables[1] == doctest::Approx(0.25).epsilon(1e-12));

    SUBCASE("inconsistent equalities are infeasible") {
        SdpProblem bad = p;
        bad.equalities.push_back({{{1, 1.0}}, 0.5});
        CHECK(solve(bad, 1e-9).status == SolveStatus::Infeasible);
    }
}

TEST_CASE("solver backend registry") {
    CHECK_THROWS_AS(solve_with("does-not-exist", SdpProblem{}, 1e-8),
                    std::invalid_argument);
    const auto names = sdp_backend_names();
    CHECK(std::find(names.begin(), names.end(), "ipm") != names.end());

    // the environment variable picks the back end
    SdpProblem p;
    p.dimension = 1;
    p.entries = {{{0, 0, 1.0}}};
    p.objective = {-1.0};
    setenv("POLYBELL_SOLVER", "no-such-backend", 1);
    CHECK_THROWS_AS(solve(p, 1e-8), std::invalid_argument);
    setenv("POLYBELL_SOLVER", "ipm", 1);
    CHECK(solve(p, 1e-8).status == SolveStatus::Optimal);
    unsetenv("POLYBELL_SOLVER");
}

TEST_CASE("sdp problem json round trip") {
    SdpProblem p;
    p.dimension = 2;
    p.fixed = {{0, 0, 1.0}, {1, 1, 1.0}};
    p.entries = {{{0, 1, 1.0}}};
    p.objective = {1.0};
    p.objective_constant = 0.25;
    p.variable_names = {"m"};
    const auto q = sdp_problem_from_json(to_json(p));
    CHECK(q.dimension == 2);
    CHECK(q.variable_names[0] == "m");
    const auto r1 = solve(p, 1e-9);
    const auto r2 = solve(q, 1e-9);
    CHECK(r1.value == doctest::Approx(r2.value).epsilon(1e-12));
}

TEST_CASE("optimal effect tuple matches the eigenvalue closed form") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
        const int d = 3;
        Eigen::MatrixXcd g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                g(i, j) = std::complex<double>(gauss(rng), gauss(rng));
        g = 0.5 * (g + g.adjoint()).eval();

        // two outcomes, zero reward on the second: optimum is the sum of the
        // positive eigenvalues of g
        const auto effects =
            optimal_effect_tuple({g, Eigen::MatrixXcd::Zero(d, d)}, 1e-10);
        REQUIRE(effects.size() == 2);
        const double got = (effects[0] * g).trace().real();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
        double want = 0.0;
        for (int i = 0; i < d; ++i) want += std::max(0.0, es.eigenvalues()(i));
        CHECK(got == doctest::Approx(want).epsilon(1e-6));

        // completeness and positivity of the tuple
        const Eigen::MatrixXcd sum = effects[0] + effects[1];
        CHECK((sum - Eigen::MatrixXcd::Identity(d, d)).norm() <= 1e-9);
        for (const auto& e : effects) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ee(e, Eigen::EigenvaluesOnly);
            CHECK(ee.eigenvalues().minCoeff() >= -1e-8);
        }
    }
}
