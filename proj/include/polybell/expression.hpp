#pragma once

#include <string>
#include <vector>

#include "polybell/correlation.hpp"
#include "polybell/scenario.hpp"

namespace polybell {

struct JointTerm {
    int a_set, b_set;  // settings, 1-based
    int a_out, b_out;  // outcomes, 1-based
    double coeff;
};

// Marginal terms carry an explicit partner setting of the other party; on
// signaling tables the marginal depends on it, so evaluation is only well
// defined once the partner is fixed.
struct MarginalTerm {
    int setting, outcome;
    double coeff;
    int partner;
};

// Sparse affine functional over joint and marginal probabilities.
struct BellExpression {
    Scenario scenario;
    double constant = 0.0;
    std::vector<JointTerm> joint;
    std::vector<MarginalTerm> a_marginal;
    std::vector<MarginalTerm> b_marginal;

    void validate() const;
};

// The CGLMP combination in the Zohren-Gill form,
//   I' = P_22(k<l) + P_12(k>l) + P_11(k<l) + P_21(k>=l),
// on two settings per party with r outcomes each. Every local model gives
// I' >= 1 while quantum models can approach 0.
BellExpression build_cglmp_iprime(int r);

// Named expressions: I3, I4 (1 - I' for r = 3, 4), CH, VB, VBprime.
BellExpression build_named(const std::string& name);

double evaluate(const BellExpression& expr, const CorrelationTable& table);

// Value of the expression on a pair of deterministic strategies (one chosen
// outcome per setting). Equivalent to evaluate() on the product table.
double evaluate_deterministic(const BellExpression& expr,
                              const std::vector<int>& a_choice,
                              const std::vector<int>& b_choice);

// Pull-back of the expression along outcome relabelings: the returned
// expression satisfies evaluate(pullback, P) == evaluate(expr, relabel(P)).
BellExpression pullback(const BellExpression& expr, const Relabeling& maps,
                        const Scenario& domain_scenario);

}  // namespace polybell
