#include "polybell/quantum_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace polybell {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

void check_psd(const MatrixXcd& m, double tol, const char* what) {
    if ((m - m.adjoint()).norm() > tol * std::max(1.0, m.norm()))
        throw invalid_model(std::string(what) + " is not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
        throw invalid_model(std::string(what) + " is not positive semidefinite");
}

}  // namespace

Scenario QuantumModel::scenario() const {
    Scenario sc;
    for (const auto& setting : a_effects)
        sc.a_outcomes.push_back(static_cast<int>(setting.size()));
    for (const auto& setting : b_effects)
        sc.b_outcomes.push_back(static_cast<int>(setting.size()));
    return sc;
}

void QuantumModel::validate(double tol) const {
    if (dim_a < 1 || dim_b < 1) throw invalid_model("dimensions must be >= 1");
    const long d = static_cast<long>(dim_a) * dim_b;
    if (state.rows() != d || state.cols() != d)
        throw invalid_model("state dimension does not match dim_a * dim_b");
    check_psd(state, tol, "state");
    if (std::abs(state.trace().real() - 1.0) > tol || std::abs(state.trace().imag()) > tol)
        throw invalid_model("state trace differs from one");

    auto check_party = [&](const std::vector<std::vector<MatrixXcd>>& effects, int dim,
                           const char* who) {
        if (effects.empty()) throw invalid_model("each party needs at least one setting");
        for (const auto& setting : effects) {
            if (setting.empty()) throw invalid_model("setting without outcomes");
            MatrixXcd sum = MatrixXcd::Zero(dim, dim);
            for (const auto& e : setting) {
                if (e.rows() != dim || e.cols() != dim)
                    throw invalid_model(std::string(who) + " effect has wrong dimension");
                check_psd(e, tol, "effect");
                sum += e;
            }
            if ((sum - MatrixXcd::Identity(dim, dim)).norm() > tol * dim)
                throw invalid_model(std::string(who) + " effects do not sum to identity");
        }
    };
    check_party(a_effects, dim_a, "Alice");
    check_party(b_effects, dim_b, "Bob");
}

CorrelationTable correlations_of(const QuantumModel& model) {
    model.validate();
    const Scenario sc = model.scenario();
    std::vector<std::vector<double>> blocks;
    for (int mu = 1; mu <= sc.a_settings(); ++mu)
        for (int nu = 1; nu <= sc.b_settings(); ++nu) {
            const int ra = sc.a_outcomes[mu - 1];
            const int rb = sc.b_outcomes[nu - 1];
            std::vector<double> blk(static_cast<size_t>(ra) * rb, 0.0);
            for (int k = 1; k <= ra; ++k)
                for (int l = 1; l <= rb; ++l) {
                    const MatrixXcd op =
                        kron(model.a_effects[mu - 1][k - 1], model.b_effects[nu - 1][l - 1]);
                    blk[static_cast<size_t>(k - 1) * rb + (l - 1)] =
                        std::max(0.0, (model.state * op).trace().real());
                }
            blocks.push_back(std::move(blk));
        }
    return CorrelationTable::from_blocks(sc, std::move(blocks), 1e-7);
}

namespace {

MatrixXcd random_unitary(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<MatrixXcd> qr(g);
    MatrixXcd q = qr.householderQ();
    // fix the phases so the distribution is Haar
    MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        const std::complex<double> diag = r(j, j);
        if (std::abs(diag) > 1e-30) q.col(j) *= diag / std::abs(diag);
    }
    return q;
}

}  // namespace

QuantumModel random_model(const Scenario& scenario, int dim_a, int dim_b,
                          const std::optional<OutcomeRestriction>& restriction,
                          uint64_t seed) {
    scenario.validate();
    if (dim_a < 1 || dim_b < 1) throw std::invalid_argument("dimensions must be >= 1");
    const OutcomeRestriction restr =
        restriction.value_or(OutcomeRestriction::full(scenario));
    restr.validate(scenario);

    std::mt19937_64 rng(seed);
    QuantumModel model;
    model.dim_a = dim_a;
    model.dim_b = dim_b;

    const long d = static_cast<long>(dim_a) * dim_b;
    std::normal_distribution<double> gauss(0.0, 1.0);
    VectorXcd psi(d);
    for (long i = 0; i < d; ++i) psi(i) = std::complex<double>(gauss(rng), gauss(rng));
    psi.normalize();
    model.state = psi * psi.adjoint();

    auto make_party = [&](Party p, int dim) {
        std::vector<std::vector<MatrixXcd>> effects;
        const int settings = scenario.settings(p);
        for (int s = 1; s <= settings; ++s) {
            const int r = scenario.outcomes(p, s);
            const auto& sup = restr.support(p, s);
            std::vector<MatrixXcd> setting(r, MatrixXcd::Zero(dim, dim));
            const MatrixXcd u = random_unitary(dim, rng);
            // split dim basis vectors across the support, as evenly as possible
            const int ns = static_cast<int>(sup.size());
            int col = 0;
            for (int i = 0; i < ns; ++i) {
                const int rank = dim / ns + (i < dim % ns ? 1 : 0);
                MatrixXcd proj = MatrixXcd::Zero(dim, dim);
                for (int c = 0; c < rank; ++c, ++col)
                    proj += u.col(col) * u.col(col).adjoint();
                setting[sup[i] - 1] = proj;
            }
            effects.push_back(std::move(setting));
        }
        return effects;
    };
    model.a_effects = make_party(Party::A, dim_a);
    model.b_effects = make_party(Party::B, dim_b);
    return model;
}

double model_moment(const QuantumModel& model, const Monomial& m) {
    if (m.zero) return 0.0;
    MatrixXcd op_a = MatrixXcd::Identity(model.dim_a, model.dim_a);
    MatrixXcd op_b = MatrixXcd::Identity(model.dim_b, model.dim_b);
    for (const auto& l : m.word) {
        if (l.party == Party::A)
            op_a = op_a * model.a_effects[l.setting - 1][l.outcome - 1];
        else
            op_b = op_b * model.b_effects[l.setting - 1][l.outcome - 1];
    }
    return (model.state * kron(op_a, op_b)).trace().real();
}

}  // namespace polybell
