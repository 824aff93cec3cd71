#pragma once

#include <vector>

#include "polybell/expression.hpp"

namespace polybell {

enum class Direction { Min, Max };

// One chosen outcome per setting and party.
struct DeterministicStrategy {
    std::vector<int> a_choice;
    std::vector<int> b_choice;
};

struct LocalBound {
    double value;
    DeterministicStrategy witness;
};

// Exact optimum of the expression over all deterministic product strategies.
// Convexity makes these sufficient for the local (atomic) bound.
LocalBound local_bound(const BellExpression& expr, Direction direction);

}  // namespace polybell
