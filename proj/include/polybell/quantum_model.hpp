#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "polybell/correlation.hpp"
#include "polybell/ncalgebra.hpp"
#include "polybell/restriction.hpp"
#include "polybell/scenario.hpp"

namespace polybell {

struct invalid_model : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Explicit state-plus-measurement model: a density matrix on the product
// space and one effect per setting and outcome, with effects outside an
// optional restriction support identically zero.
struct QuantumModel {
    int dim_a = 0;
    int dim_b = 0;
    Eigen::MatrixXcd state;  // (dim_a*dim_b) x (dim_a*dim_b)
    std::vector<std::vector<Eigen::MatrixXcd>> a_effects;  // [setting-1][outcome-1]
    std::vector<std::vector<Eigen::MatrixXcd>> b_effects;

    Scenario scenario() const;
    // Throws invalid_model unless the state is psd with unit trace and every
    // setting's effects are psd and complete, all within tol.
    void validate(double tol = 1e-9) const;
};

// P_{mu,nu}(k,l) = tr(rho . E'_k tensor E_l).
CorrelationTable correlations_of(const QuantumModel& model);

// Reproducible random pure state with random projective measurements whose
// ranks partition the local dimension across the restricted support.
QuantumModel random_model(const Scenario& scenario, int dim_a, int dim_b,
                          const std::optional<OutcomeRestriction>& restriction,
                          uint64_t seed);

// Re<word> of a projector word in the model; the moment feeding the matrix
// entry of that class.
double model_moment(const QuantumModel& model, const Monomial& m);

}  // namespace polybell
