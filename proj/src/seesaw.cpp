#include "polybell/seesaw.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "polybell/lp.hpp"
#include "polybell/parallel.hpp"
#include "polybell/sdp_solver.hpp"

namespace polybell {

namespace {

using Eigen::MatrixXcd;

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// tr_B(rho (I tensor M))
MatrixXcd contract_b(const MatrixXcd& rho, int da, int db, const MatrixXcd& m) {
    MatrixXcd out = MatrixXcd::Zero(da, da);
    for (int p = 0; p < da; ++p)
        for (int q = 0; q < da; ++q) {
            std::complex<double> sum = 0.0;
            for (int r = 0; r < db; ++r)
                for (int s = 0; s < db; ++s)
                    sum += rho(p * db + r, q * db + s) * m(s, r);
            out(p, q) = sum;
        }
    return out;
}

// tr_A(rho (M tensor I))
MatrixXcd contract_a(const MatrixXcd& rho, int da, int db, const MatrixXcd& m) {
    MatrixXcd out = MatrixXcd::Zero(db, db);
    for (int r = 0; r < db; ++r)
        for (int s = 0; s < db; ++s) {
            std::complex<double> sum = 0.0;
            for (int p = 0; p < da; ++p)
                for (int q = 0; q < da; ++q)
                    sum += rho(p * db + r, q * db + s) * m(q, p);
            out(r, s) = sum;
        }
    return out;
}

MatrixXcd bell_operator(const BellExpression& expr, const QuantumModel& m) {
    const long d = static_cast<long>(m.dim_a) * m.dim_b;
    MatrixXcd op = expr.constant * MatrixXcd::Identity(d, d);
    for (const auto& t : expr.joint)
        op += t.coeff * kron(m.a_effects[t.a_set - 1][t.a_out - 1],
                             m.b_effects[t.b_set - 1][t.b_out - 1]);
    const MatrixXcd ida = MatrixXcd::Identity(m.dim_a, m.dim_a);
    const MatrixXcd idb = MatrixXcd::Identity(m.dim_b, m.dim_b);
    for (const auto& t : expr.a_marginal)
        op += t.coeff * kron(m.a_effects[t.setting - 1][t.outcome - 1], idb);
    for (const auto& t : expr.b_marginal)
        op += t.coeff * kron(ida, m.b_effects[t.setting - 1][t.outcome - 1]);
    return 0.5 * (op + op.adjoint());
}

}  // namespace

// Real symmetric embedding H = A + iB -> [[A,-B],[B,A]] of each effect block.
std::vector<MatrixXcd> optimal_effect_tuple(const std::vector<MatrixXcd>& grads,
                                            double sdp_tol) {
    const int nk = static_cast<int>(grads.size());
    const int d = static_cast<int>(grads[0].rows());
    const int n_sym = d * (d + 1) / 2;
    const int n_anti = d * (d - 1) / 2;

    SdpProblem prob;
    prob.dimension = nk * 2 * d;
    auto sym_var = [&](int k, int p, int q) {  // p <= q
        return k * (n_sym + n_anti) + p * d - p * (p - 1) / 2 + (q - p);
    };
    auto anti_var = [&](int k, int p, int q) {  // p < q
        return k * (n_sym + n_anti) + n_sym + p * (d - 1) - p * (p - 1) / 2 + (q - p - 1);
    };
    prob.entries.resize(static_cast<size_t>(nk) * (n_sym + n_anti));
    prob.objective.assign(prob.entries.size(), 0.0);

    for (int k = 0; k < nk; ++k) {
        const int o = k * 2 * d;
        for (int p = 0; p < d; ++p)
            for (int q = p; q < d; ++q) {
                auto& cells = prob.entries[sym_var(k, p, q)];
                cells.push_back({o + p, o + q, 1.0});
                cells.push_back({o + d + p, o + d + q, 1.0});
                prob.objective[sym_var(k, p, q)] =
                    (p == q ? 1.0 : 2.0) * grads[k](p, q).real();
            }
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) {
                auto& cells = prob.entries[anti_var(k, p, q)];
                cells.push_back({o + p, o + d + q, -1.0});
                cells.push_back({o + q, o + d + p, 1.0});
                prob.objective[anti_var(k, p, q)] = 2.0 * grads[k](p, q).imag();
            }
    }

    // completeness: sum_k A_k = identity, sum_k B_k = 0
    for (int p = 0; p < d; ++p)
        for (int q = p; q < d; ++q) {
            SdpProblem::Equality eq;
            for (int k = 0; k < nk; ++k) eq.terms.push_back({sym_var(k, p, q), 1.0});
            eq.rhs = (p == q) ? 1.0 : 0.0;
            prob.equalities.push_back(std::move(eq));
        }
    for (int p = 0; p < d; ++p)
        for (int q = p + 1; q < d; ++q) {
            SdpProblem::Equality eq;
            for (int k = 0; k < nk; ++k) eq.terms.push_back({anti_var(k, p, q), 1.0});
            eq.rhs = 0.0;
            prob.equalities.push_back(std::move(eq));
        }

    const SolveResult res = solve(prob, sdp_tol);
    if (!res.usable(sdp_tol))
        throw solver_error("measurement step failed: " + res.message);

    std::vector<MatrixXcd> effects(nk, MatrixXcd::Zero(d, d));
    for (int k = 0; k < nk; ++k)
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) {
                const double re = res.variables[sym_var(k, std::min(p, q), std::max(p, q))];
                double im = 0.0;
                if (p < q) im = res.variables[anti_var(k, p, q)];
                if (p > q) im = -res.variables[anti_var(k, q, p)];
                effects[k](p, q) = std::complex<double>(re, im);
            }
    return effects;
}

namespace {

struct RestartOutcome {
    bool ok = false;
    QuantumModel model;
    double value = 0.0;
    int iterations = 0;
};

RestartOutcome run_restart(const BellExpression& expr, int dim_a, int dim_b,
                           const OutcomeRestriction& restr, uint64_t seed,
                           const SeesawOptions& opt) {
    RestartOutcome out;
    QuantumModel m = random_model(expr.scenario, dim_a, dim_b, restr, seed);

    auto objective = [&](const QuantumModel& model) {
        return (model.state * bell_operator(expr, model)).trace().real();
    };

    auto record = [&] {
        if (opt.step_trace) opt.step_trace->push_back(objective(m));
    };

    double prev = objective(m);
    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        // state step: top eigenvector of the Bell operator
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(bell_operator(expr, m));
        const auto& vecs = es.eigenvectors();
        const Eigen::VectorXcd top = vecs.col(vecs.cols() - 1);
        m.state = top * top.adjoint();
        record();

        // measurement steps, one setting at a time
        for (int mu = 1; mu <= expr.scenario.a_settings(); ++mu) {
            const auto& sup = restr.a_supports[mu - 1];
            std::vector<MatrixXcd> grads;
            for (int k : sup) {
                MatrixXcd g = MatrixXcd::Zero(dim_a, dim_a);
                for (const auto& t : expr.joint)
                    if (t.a_set == mu && t.a_out == k)
                        g += t.coeff * contract_b(m.state, dim_a, dim_b,
                                                  m.b_effects[t.b_set - 1][t.b_out - 1]);
                for (const auto& t : expr.a_marginal)
                    if (t.setting == mu && t.outcome == k)
                        g += t.coeff * contract_b(m.state, dim_a, dim_b,
                                                  MatrixXcd::Identity(dim_b, dim_b));
                g = 0.5 * (g + g.adjoint()).eval();
                grads.push_back(std::move(g));
            }
            const auto effects = optimal_effect_tuple(grads, opt.sdp_tol);
            for (size_t i = 0; i < sup.size(); ++i)
                m.a_effects[mu - 1][sup[i] - 1] = effects[i];
            record();
        }
        for (int nu = 1; nu <= expr.scenario.b_settings(); ++nu) {
            const auto& sup = restr.b_supports[nu - 1];
            std::vector<MatrixXcd> grads;
            for (int l : sup) {
                MatrixXcd g = MatrixXcd::Zero(dim_b, dim_b);
                for (const auto& t : expr.joint)
                    if (t.b_set == nu && t.b_out == l)
                        g += t.coeff * contract_a(m.state, dim_a, dim_b,
                                                  m.a_effects[t.a_set - 1][t.a_out - 1]);
                for (const auto& t : expr.b_marginal)
                    if (t.setting == nu && t.outcome == l)
                        g += t.coeff * contract_a(m.state, dim_a, dim_b,
                                                  MatrixXcd::Identity(dim_a, dim_a));
                g = 0.5 * (g + g.adjoint()).eval();
                grads.push_back(std::move(g));
            }
            const auto effects = optimal_effect_tuple(grads, opt.sdp_tol);
            for (size_t i = 0; i < sup.size(); ++i)
                m.b_effects[nu - 1][sup[i] - 1] = effects[i];
            record();
        }

        const double cur = objective(m);
        if (cur - prev < opt.tol) {
            prev = cur;
            ++iter;
            break;
        }
        prev = cur;
    }

    out.ok = true;
    out.model = std::move(m);
    out.value = evaluate(expr, correlations_of(out.model));
    out.iterations = iter;
    return out;
}

}  // namespace

SeesawResult seesaw(const BellExpression& expr, int dim_a, int dim_b,
                    const std::optional<OutcomeRestriction>& restriction,
                    const SeesawOptions& options) {
    expr.validate();
    if (dim_a < 2 || dim_b < 2) throw std::invalid_argument("dimensions must be >= 2");
    if (options.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    const OutcomeRestriction restr =
        restriction.value_or(OutcomeRestriction::full(expr.scenario));
    restr.validate(expr.scenario);

    std::vector<RestartOutcome> outcomes(options.restarts);
    parallel_for(options.restarts, options.jobs, [&](size_t r) {
        // a fresh random start on solver failure, a few attempts per slot
        for (int attempt = 0; attempt < 3; ++attempt) {
            try {
                outcomes[r] = run_restart(expr, dim_a, dim_b, restr,
                                          options.seed + 7919 * r + 1000003ULL * attempt,
                                          options);
                return;
            } catch (const solver_error&) {
            }
        }
    });

    SeesawResult best;
    best.failed_restarts = 0;
    bool found = false;
    for (size_t r = 0; r < outcomes.size(); ++r) {
        if (!outcomes[r].ok) {
            ++best.failed_restarts;
            continue;
        }
        if (!found || outcomes[r].value > best.value) {
            best.model = outcomes[r].model;
            best.value = outcomes[r].value;
            best.iterations = outcomes[r].iterations;
            best.restart = static_cast<int>(r);
            found = true;
        }
    }
    if (!found) throw search_failed("all see-saw restarts failed");
    return best;
}

}  // namespace polybell
