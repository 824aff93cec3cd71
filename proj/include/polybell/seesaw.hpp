#pragma once

#include <cstdint>
#include <vector>
#include <optional>
#include <stdexcept>

#include "polybell/expression.hpp"
#include "polybell/quantum_model.hpp"
#include "polybell/restriction.hpp"

namespace polybell {

struct search_failed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeesawOptions {
    int restarts = 20;
    uint64_t seed = 1;
    double tol = 1e-9;       // stop when the objective gain drops below this
    int max_iterations = 500;
    int jobs = 0;
    double sdp_tol = 1e-10;  // measurement-step solves
    // When set (use restarts = 1, jobs = 1), receives the objective after
    // every state and measurement step; ascent is monotone.
    std::vector<double>* step_trace = nullptr;
};

struct SeesawResult {
    QuantumModel model;
    double value;      // evaluate(expr, correlations_of(model))
    int iterations;    // of the winning restart
    int restart;       // index of the winning restart
    int failed_restarts = 0;
};

// Maximizes sum_k Re tr(E_k G_k) over tuples of effects that are psd and
// sum to the identity (the see-saw measurement step), via a real embedding
// of the complex Hermitian blocks.
std::vector<Eigen::MatrixXcd> optimal_effect_tuple(
    const std::vector<Eigen::MatrixXcd>& gradients, double sdp_tol = 1e-10);

// Alternating optimization: the state step takes the top eigenvector of the
// Bell operator, the measurement step maximizes the linear functional over
// effect tuples with completeness and restriction constraints (a small SDP).
// Yields certified lower bounds on the quantum value.
SeesawResult seesaw(const BellExpression& expr, int dim_a, int dim_b,
                    const std::optional<OutcomeRestriction>& restriction,
                    const SeesawOptions& options = {});

}  // namespace polybell
