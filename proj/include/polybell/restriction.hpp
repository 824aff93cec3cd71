#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polybell/expression.hpp"
#include "polybell/scenario.hpp"

namespace polybell {

// Per party and setting, the subset of outcome labels allowed to be
// non-trivial. Everything outside a support carries zero probability.
struct OutcomeRestriction {
    std::vector<std::vector<int>> a_supports;  // sorted ascending, 1-based labels
    std::vector<std::vector<int>> b_supports;

    static OutcomeRestriction full(const Scenario& sc);

    const std::vector<int>& support(Party p, int setting) const {
        return p == Party::A ? a_supports[setting - 1] : b_supports[setting - 1];
    }

    void validate(const Scenario& sc) const;
    std::string key() const;  // canonical string, for dedup and reports
};

// Inverse of OutcomeRestriction::key().
OutcomeRestriction restriction_from_key(const Scenario& scenario, const std::string& key);

// All assignments of per-setting supports of size min(n, r). Only maximal
// supports are emitted; smaller ones are dominated.
std::vector<OutcomeRestriction> enumerate_restrictions(const Scenario& scenario, int n);

// One outcome permutation per party and setting.
struct ScenarioSymmetry {
    std::vector<std::vector<int>> a_perms;  // [setting-1][old-1] -> new label
    std::vector<std::vector<int>> b_perms;
};

// All simultaneous outcome relabelings that leave the expression invariant,
// found by depth-first search over per-setting permutations with block-wise
// coefficient pruning. Throws if the group exceeds `cap` elements.
std::vector<ScenarioSymmetry> expression_symmetries(const BellExpression& expr,
                                                    size_t cap = 200000);

// Keeps one representative per orbit of the restriction list under the
// symmetry group of the expression.
std::vector<OutcomeRestriction> dedup_restrictions(
    const std::vector<OutcomeRestriction>& restrictions,
    const std::vector<ScenarioSymmetry>& symmetries);

}  // namespace polybell
