#include "polybell/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>

namespace polybell {

void SdpProblem::validate() const {
    if (dimension < 1) throw std::invalid_argument("sdp dimension must be >= 1");
    auto check_cell = [&](const SdpCell& c) {
        if (c.row < 0 || c.col < 0 || c.row >= dimension || c.col >= dimension ||
            c.row > c.col)
            throw std::invalid_argument("sdp cell out of range (need row <= col)");
    };
    for (const auto& c : fixed) check_cell(c);
    for (const auto& var : entries)
        for (const auto& c : var) check_cell(c);
    if (objective.size() != entries.size())
        throw std::invalid_argument("objective length must match variable count");
    for (const auto& eq : equalities)
        for (const auto& [v, c] : eq.terms)
            if (v < 0 || v >= num_vars())
                throw std::invalid_argument("equality references unknown variable");
    if (!variable_names.empty() && variable_names.size() != entries.size())
        throw std::invalid_argument("variable_names length mismatch");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::NearOptimal: return "near-optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Failed: return "failed";
    }
    return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SymCell {
    int row, col;
    double value;
};

// Expands upper-triangle cells to the full symmetric list used by the
// trace formulas.
std::vector<SymCell> expand_cells(const std::vector<SdpCell>& cells) {
    std::vector<SymCell> out;
    out.reserve(cells.size() * 2);
    for (const auto& c : cells) {
        out.push_back({c.row, c.col, c.value});
        if (c.row != c.col) out.push_back({c.col, c.row, c.value});
    }
    return out;
}

MatrixXd dense_from_cells(int n, const std::vector<SdpCell>& cells) {
    MatrixXd m = MatrixXd::Zero(n, n);
    for (const auto& c : cells) {
        m(c.row, c.col) += c.value;
        if (c.row != c.col) m(c.col, c.row) += c.value;
    }
    return m;
}

// Largest step alpha <= 1 with S + alpha * dS psd, shrunk by tau.
double max_step(const MatrixXd& s, const MatrixXd& ds, double tau) {
    Eigen::LLT<MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) {
        MatrixXd jittered = s + 1e-12 * s.trace() / s.rows() * MatrixXd::Identity(s.rows(), s.cols());
        llt.compute(jittered);
        if (llt.info() != Eigen::Success) return 0.0;
    }
    MatrixXd w = llt.matrixL().solve(ds);
    MatrixXd m = llt.matrixL().solve(w.transpose()).transpose();
    m = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= 0.0) return 1.0;
    return std::min(1.0, -tau / lmin);
}

struct ReducedProblem {
    int n = 0;
    MatrixXd f0;
    std::vector<std::vector<SdpCell>> entries;
    std::vector<std::vector<SymCell>> sym;
    VectorXd q;
    double constant = 0.0;

    struct Elim {
        int var;
        double rhs;
        std::vector<std::pair<int, double>> terms;  // over original variables
    };
    std::vector<Elim> elims;
    std::vector<int> free_index;  // original var -> reduced index or -1
    bool infeasible = false;
    bool unbounded = false;
    std::string message;
};

void merge_cells(std::vector<SdpCell>& cells) {
    std::map<std::pair<int, int>, double> acc;
    for (const auto& c : cells) acc[{c.row, c.col}] += c.value;
    cells.clear();
    for (const auto& [rc, v] : acc)
        if (v != 0.0) cells.push_back({rc.first, rc.second, v});
}

// Substitutes the extra linear equalities away by Gaussian elimination so
// the interior-point core only sees a pure linear matrix inequality.
ReducedProblem presolve(const SdpProblem& p) {
    ReducedProblem r;
    r.n = p.dimension;
    r.constant = p.objective_constant;

    const int m = p.num_vars();
    std::vector<std::map<int, double>> eqs;
    std::vector<double> rhs;
    for (const auto& eq : p.equalities) {
        std::map<int, double> row;
        for (const auto& [v, c] : eq.terms) row[v] += c;
        eqs.push_back(std::move(row));
        rhs.push_back(eq.rhs);
    }

    std::vector<std::vector<SdpCell>> cells(p.entries.begin(), p.entries.end());
    std::vector<SdpCell> fixed(p.fixed.begin(), p.fixed.end());
    std::vector<double> obj(p.objective.begin(), p.objective.end());
    std::vector<bool> eliminated(m, false);

    for (size_t e = 0; e < eqs.size(); ++e) {
        // pick the pivot with the largest coefficient among free variables
        int pivot = -1;
        double best = 1e-12;
        for (const auto& [v, c] : eqs[e])
            if (!eliminated[v] && std::abs(c) > best) { pivot = v; best = std::abs(c); }
        if (pivot < 0) {
            if (std::abs(rhs[e]) > 1e-9) {
                r.infeasible = true;
                r.message = "inconsistent equality constraints";
                return r;
            }
            continue;  // redundant
        }
        const double pc = eqs[e][pivot];
        ReducedProblem::Elim elim;
        elim.var = pivot;
        elim.rhs = rhs[e] / pc;
        for (const auto& [v, c] : eqs[e])
            if (v != pivot && c != 0.0) elim.terms.push_back({v, -c / pc});

        // substitute into the matrix map and the objective
        for (const auto& cell : cells[pivot]) {
            fixed.push_back({cell.row, cell.col, cell.value * elim.rhs});
            for (const auto& [v, w] : elim.terms)
                cells[v].push_back({cell.row, cell.col, cell.value * w});
        }
        cells[pivot].clear();
        r.constant += obj[pivot] * elim.rhs;
        for (const auto& [v, w] : elim.terms) obj[v] += obj[pivot] * w;
        obj[pivot] = 0.0;

        // substitute into the remaining equalities
        for (size_t e2 = e + 1; e2 < eqs.size(); ++e2) {
            auto it = eqs[e2].find(pivot);
            if (it == eqs[e2].end() || it->second == 0.0) continue;
            const double f = it->second;
            eqs[e2].erase(it);
            for (const auto& [v, w] : elim.terms) eqs[e2][v] += f * w;
            rhs[e2] -= f * elim.rhs;
        }

        eliminated[pivot] = true;
        r.elims.push_back(std::move(elim));
    }

    r.free_index.assign(m, -1);
    std::vector<double> qv;
    for (int v = 0; v < m; ++v) {
        if (eliminated[v]) continue;
        merge_cells(cells[v]);
        if (cells[v].empty()) {
            if (std::abs(obj[v]) > 1e-12) {
                r.unbounded = true;
                r.message = "variable without matrix entries has nonzero objective";
                return r;
            }
            continue;  // value irrelevant, fixed to zero on report
        }
        r.free_index[v] = static_cast<int>(r.entries.size());
        r.entries.push_back(cells[v]);
        r.sym.push_back(expand_cells(cells[v]));
        qv.push_back(obj[v]);
    }
    r.q = Eigen::Map<VectorXd>(qv.data(), static_cast<long>(qv.size()));
    merge_cells(fixed);
    r.f0 = dense_from_cells(p.dimension, fixed);
    return r;
}

}  // namespace

SolveResult solve_ipm(const SdpProblem& problem, double tol) {
    problem.validate();
    if (tol == 0.0) tol = problem.dimension < 200 ? 1e-8 : 1e-6;
    if (tol < 1e-10 || tol > 1e-4) throw std::invalid_argument("tolerance out of range");

    SolveResult res;
    ReducedProblem rp = presolve(problem);
    if (rp.infeasible) {
        res.status = SolveStatus::Infeasible;
        res.message = rp.message;
        return res;
    }
    if (rp.unbounded) {
        res.status = SolveStatus::Failed;
        res.message = rp.message;
        return res;
    }

    const int n = rp.n;
    const int m = static_cast<int>(rp.entries.size());

    auto assemble = [&](const VectorXd& y) {
        MatrixXd z = rp.f0;
        for (int i = 0; i < m; ++i)
            for (const auto& c : rp.sym[i]) z(c.row, c.col) += y(i) * c.value;
        return z;
    };

    auto finish = [&](const VectorXd& y, double dual_obj, double primal_obj,
                      double pinf, double dinf, double ynorm, int iters,
                      SolveStatus status, const std::string& msg) {
        res.status = status;
        res.iterations = iters;
        res.message = msg;
        res.value = dual_obj + rp.constant;
        const double slack = pinf * std::max(1.0, ynorm);
        res.upper_value = primal_obj + rp.constant + slack;
        res.duality_gap = std::max(0.0, primal_obj - dual_obj);
        res.primal_residual = pinf;
        res.dual_residual = dinf;
        res.matrix = assemble(y);

        res.variables.assign(problem.num_vars(), 0.0);
        for (int v = 0; v < problem.num_vars(); ++v)
            if (rp.free_index[v] >= 0) res.variables[v] = y(rp.free_index[v]);
        for (auto it = rp.elims.rbegin(); it != rp.elims.rend(); ++it) {
            double val = it->rhs;
            for (const auto& [v, w] : it->terms) val += w * res.variables[v];
            res.variables[it->var] = val;
        }
        return res;
    };

    if (m == 0) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(rp.f0, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        const SolveStatus st =
            lmin >= -1e-9 * std::max(1.0, rp.f0.norm()) ? SolveStatus::Optimal
                                                        : SolveStatus::Infeasible;
        return finish(VectorXd::Zero(0), 0.0, 0.0, 0.0, 0.0, 0.0, 0,
                      st, st == SolveStatus::Optimal ? "" : "fixed matrix not psd");
    }

    const double qnorm = std::max(1.0, rp.q.lpNorm<Eigen::Infinity>());
    const double f0norm = std::max(1.0, rp.f0.norm());

    VectorXd y = VectorXd::Zero(m);
    MatrixXd x = std::max({10.0, std::sqrt(double(n)), qnorm}) * MatrixXd::Identity(n, n);
    MatrixXd z = std::max({10.0, std::sqrt(double(n)), f0norm}) * MatrixXd::Identity(n, n);

    const int max_iter = 200;
    const double tau = 0.98;
    int stall = 0;
    int iter = 0;

    // best iterate seen so far, returned on numerical breakdown
    struct Snapshot {
        VectorXd y;
        double pobj = 0, dobj = 0, pinf = 1e30, dinf = 1e30, merit = 1e30;
        int iter = 0;
    } best;
    best.y = y;

    auto classify = [&](const Snapshot& s, const std::string& why) {
        const double gap_rel =
            std::abs(s.pobj - s.dobj) / (1.0 + std::abs(s.pobj) + std::abs(s.dobj));
        SolveStatus st = SolveStatus::Failed;
        std::string msg = why;
        if (gap_rel <= tol && s.pinf <= tol && s.dinf <= tol) {
            st = SolveStatus::Optimal;
            msg.clear();
        } else if (gap_rel <= 1e4 * tol && s.pinf <= 1e4 * tol && s.dinf <= 1e4 * tol) {
            st = SolveStatus::NearOptimal;
            msg = why.empty() ? "converged to reduced accuracy" : why;
        }
        return finish(s.y, s.dobj, s.pobj, s.pinf, s.dinf, s.y.lpNorm<1>(), s.iter, st,
                      msg);
    };

    for (iter = 0; iter < max_iter; ++iter) {
        Eigen::LLT<MatrixXd> lltz(z);
        if (lltz.info() != Eigen::Success) {
            z += 1e-12 * z.trace() / n * MatrixXd::Identity(n, n);
            lltz.compute(z);
            if (lltz.info() != Eigen::Success)
                return classify(best, "dual slack lost definiteness");
        }
        MatrixXd zinv = lltz.solve(MatrixXd::Identity(n, n));
        zinv = 0.5 * (zinv + zinv.transpose());

        MatrixXd rd = assemble(y) - z;  // dual residual F0 + sum yF - Z
        VectorXd rp_vec(m);
        for (int i = 0; i < m; ++i) {
            double fx = 0.0;
            for (const auto& c : rp.sym[i]) fx += c.value * x(c.row, c.col);
            rp_vec(i) = -rp.q(i) - fx;
        }
        const double pobj = rp.f0.cwiseProduct(x).sum();
        const double dobj = rp.q.dot(y);
        const double pinf = rp_vec.lpNorm<Eigen::Infinity>() / qnorm;
        const double dinf = rd.norm() / f0norm;
        const double mu = x.cwiseProduct(z).sum() / n;
        const double gap_rel = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        if (!std::isfinite(mu) || !std::isfinite(gap_rel))
            return classify(best, "iterates lost finiteness");
        const double merit = std::max({gap_rel, pinf, dinf});
        if (merit < best.merit) best = {y, pobj, dobj, pinf, dinf, merit, iter};

        if (gap_rel <= tol && pinf <= tol && dinf <= tol)
            return finish(y, dobj, pobj, pinf, dinf, y.lpNorm<1>(), iter,
                          SolveStatus::Optimal, "");
        if (std::abs(dobj) > 1e12 * qnorm)
            return classify(best, "dual objective diverged");

        // Schur complement H_ij = tr(F_i X F_j Z^{-1})
        MatrixXd h = MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                double sum = 0.0;
                for (const auto& a : rp.sym[i])
                    for (const auto& b : rp.sym[j])
                        sum += a.value * b.value * x(a.col, b.row) * zinv(b.col, a.row);
                h(i, j) = sum;
            }
        }
        h = 0.5 * (h + h.transpose()).eval();
        if (!h.allFinite()) return classify(best, "schur matrix lost finiteness");

        VectorXd v_vec(m), w_vec(m);
        MatrixXd mw = x * rd * zinv;
        for (int i = 0; i < m; ++i) {
            double sv = 0.0, sw = 0.0;
            for (const auto& c : rp.sym[i]) {
                sv += c.value * zinv(c.col, c.row);
                sw += c.value * mw(c.col, c.row);
            }
            v_vec(i) = sv;
            w_vec(i) = sw;
        }

        Eigen::LDLT<MatrixXd> hfact(h);
        double ridge = 1e-13 * std::max(1.0, h.trace() / m);
        while (hfact.info() != Eigen::Success && ridge < 1.0) {
            hfact.compute(h + ridge * MatrixXd::Identity(m, m));
            ridge *= 100.0;
        }
        if (hfact.info() != Eigen::Success)
            return classify(best, "schur factorization failed");

        // predictor
        VectorXd dy_p = hfact.solve(rp.q - w_vec);
        if (!dy_p.allFinite()) return classify(best, "search direction lost finiteness");
        MatrixXd dz_p = rd;
        for (int i = 0; i < m; ++i)
            for (const auto& c : rp.sym[i]) dz_p(c.row, c.col) += dy_p(i) * c.value;
        MatrixXd dx_p = -x - x * dz_p * zinv;
        dx_p = 0.5 * (dx_p + dx_p.transpose()).eval();

        const double ap_aff = max_step(x, dx_p, 1.0);
        const double ad_aff = max_step(z, dz_p, 1.0);
        const double mu_aff =
            (x + ap_aff * dx_p).cwiseProduct(z + ad_aff * dz_p).sum() / n;
        double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
        sigma = std::clamp(sigma, 1e-8, 1.0);

        // corrector with Mehrotra second-order term
        MatrixXd mu_mat = dx_p * dz_p * zinv;
        VectorXd u_vec(m);
        for (int i = 0; i < m; ++i) {
            double su = 0.0;
            for (const auto& c : rp.sym[i]) su += c.value * mu_mat(c.col, c.row);
            u_vec(i) = su;
        }
        VectorXd dy = hfact.solve(sigma * mu * v_vec + rp.q - w_vec - u_vec);
        MatrixXd dz = rd;
        for (int i = 0; i < m; ++i)
            for (const auto& c : rp.sym[i]) dz(c.row, c.col) += dy(i) * c.value;
        MatrixXd dx = sigma * mu * zinv - x - x * dz * zinv - mu_mat;
        dx = 0.5 * (dx + dx.transpose()).eval();

        const double ap = std::min(1.0, max_step(x, dx, tau));
        const double ad = std::min(1.0, max_step(z, dz, tau));

        x += ap * dx;
        y += ad * dy;
        z += ad * dz;
        x = 0.5 * (x + x.transpose()).eval();
        z = 0.5 * (z + z.transpose()).eval();

        if (!x.allFinite() || !z.allFinite() || !y.allFinite())
            return classify(best, "iterates lost finiteness");

        if (ap < 1e-4 && ad < 1e-4) {
            if (++stall >= 3) return classify(best, "step lengths collapsed");
        } else {
            stall = 0;
        }
    }

    return classify(best, "no convergence within iteration limit");
}

namespace {

std::map<std::string, SdpBackend>& backend_registry() {
    static std::map<std::string, SdpBackend> reg{{"ipm", solve_ipm}};
    return reg;
}
std::mutex backend_mutex;

}  // namespace

void register_sdp_backend(const std::string& name, SdpBackend backend) {
    std::lock_guard<std::mutex> lock(backend_mutex);
    backend_registry()[name] = std::move(backend);
}

std::vector<std::string> sdp_backend_names() {
    std::lock_guard<std::mutex> lock(backend_mutex);
    std::vector<std::string> names;
    for (const auto& [name, _] : backend_registry()) names.push_back(name);
    return names;
}

SolveResult solve_with(const std::string& backend, const SdpProblem& problem, double tol) {
    SdpBackend fn;
    {
        std::lock_guard<std::mutex> lock(backend_mutex);
        auto it = backend_registry().find(backend);
        if (it == backend_registry().end()) {
            std::ostringstream os;
            os << "unknown SDP back end '" << backend << "'; available:";
            for (const auto& [name, _] : backend_registry()) os << " " << name;
            throw std::invalid_argument(os.str());
        }
        fn = it->second;
    }
    return fn(problem, tol);
}

SolveResult solve(const SdpProblem& problem, double tol) {
    const char* env = std::getenv("POLYBELL_SOLVER");
    return solve_with(env && *env ? env : "ipm", problem, tol);
}

}  // namespace polybell
