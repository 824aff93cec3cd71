#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polybell/expression.hpp"
#include "polybell/local_bound.hpp"
#include "polybell/restriction.hpp"

namespace polybell {

// Exact optimum of the expression over the non-signaling polytope, with
// outcomes outside the restriction forced to probability zero.
double nonsignaling_bound(const BellExpression& expr,
                          const std::optional<OutcomeRestriction>& restriction,
                          Direction direction);

// Same optimum plus the table attaining it (a vertex of the polytope).
std::pair<double, CorrelationTable> nonsignaling_bound_witness(
    const BellExpression& expr, const std::optional<OutcomeRestriction>& restriction,
    Direction direction);

struct RestrictedNsBound {
    double value;
    std::vector<std::pair<std::string, double>> breakdown;  // restriction key -> bound
};

// Optimum over the whole family enumerate_restrictions(scenario, n).
RestrictedNsBound nonsignaling_bound_over(const BellExpression& expr, int n,
                                          Direction direction);

}  // namespace polybell
