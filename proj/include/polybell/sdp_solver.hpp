#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "polybell/sdp_problem.hpp"

namespace polybell {

enum class SolveStatus { Optimal, NearOptimal, Infeasible, Failed };

std::string to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::Failed;
    double value = 0.0;        // objective_constant + objective . y
    // conjugate objective with the feasibility residual absorbed; a certified
    // upper bound on the true maximum
    double upper_value = 0.0;
    double duality_gap = 0.0;  // conjugate gap; <= tolerance at optimal status
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    Eigen::MatrixXd matrix;        // M(y) at the solution
    std::vector<double> variables;  // y
    std::string message;

    bool usable(double tol) const {
        return status == SolveStatus::Optimal ||
               (status == SolveStatus::NearOptimal && duality_gap <= 1e3 * tol);
    }
};

using SdpBackend = std::function<SolveResult(const SdpProblem&, double tol)>;

// Back ends are selected by name; the environment variable POLYBELL_SOLVER
// overrides the default ("ipm", the embedded primal-dual interior-point
// method).
void register_sdp_backend(const std::string& name, SdpBackend backend);
std::vector<std::string> sdp_backend_names();

// tol = 0 picks the default: 1e-8 below dimension 200, 1e-6 above.
SolveResult solve(const SdpProblem& problem, double tol = 0.0);
SolveResult solve_with(const std::string& backend, const SdpProblem& problem,
                       double tol = 0.0);

// The embedded back end, callable directly.
SolveResult solve_ipm(const SdpProblem& problem, double tol);

}  // namespace polybell
