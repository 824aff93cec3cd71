#pragma once

#include <string>

#include "json.hpp"
#include "polybell/correlation.hpp"
#include "polybell/expression.hpp"
#include "polybell/quantum_model.hpp"
#include "polybell/scenario.hpp"
#include "polybell/sdp_problem.hpp"
#include "polybell/sdp_solver.hpp"

namespace polybell {

nlohmann::json to_json(const Scenario& sc);
Scenario scenario_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BellExpression& expr);
BellExpression expression_from_json(const nlohmann::json& j);
BellExpression load_expression(const std::string& path);
void save_expression(const BellExpression& expr, const std::string& path);

nlohmann::json to_json(const CorrelationTable& table);
CorrelationTable table_from_json(const nlohmann::json& j);

nlohmann::json to_json(const QuantumModel& model);
QuantumModel model_from_json(const nlohmann::json& j);

// Sparse handoff format for external solvers: dimension, fixed cells,
// per-variable cell lists, objective, optional equalities.
nlohmann::json to_json(const SdpProblem& problem);
SdpProblem sdp_problem_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SolveResult& result);

}  // namespace polybell
