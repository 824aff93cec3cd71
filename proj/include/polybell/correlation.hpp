#pragma once

#include <vector>

#include "polybell/scenario.hpp"

namespace polybell {

// Joint outcome probabilities P_{mu,nu}(k,l) for every pair of settings,
// stored densely per setting-pair block. Immutable after construction.
class CorrelationTable {
  public:
    // Validates block shapes, clamps tiny negatives to zero and checks that
    // every block sums to one within `norm_tol`.
    static CorrelationTable from_blocks(Scenario scenario,
                                        std::vector<std::vector<double>> blocks,
                                        double norm_tol = 1e-9);

    // Uniform table p = 1/(r_a * r_b) on every block.
    static CorrelationTable uniform(const Scenario& scenario);

    // Deterministic table: strategy picks one outcome per setting and party.
    static CorrelationTable deterministic(const Scenario& scenario,
                                          const std::vector<int>& a_choice,
                                          const std::vector<int>& b_choice);

    const Scenario& scenario() const { return scenario_; }

    // 1-based accessors.
    double p(int a_set, int b_set, int a_out, int b_out) const;
    double a_marginal(int a_set, int a_out, int partner_b_set) const;
    double b_marginal(int b_set, int b_out, int partner_a_set) const;

    const std::vector<double>& block(int a_set, int b_set) const;
    int block_index(int a_set, int b_set) const;

  private:
    CorrelationTable(Scenario sc, std::vector<std::vector<double>> blocks)
        : scenario_(std::move(sc)), blocks_(std::move(blocks)) {}

    Scenario scenario_;
    std::vector<std::vector<double>> blocks_;  // [pair][ (k-1)*r_b + (l-1) ]
};

enum class MergeParty { A, B, Both };

// Adds the probability mass of outcome `from` into `into` and removes the
// label `from`, for every setting of the chosen party where both labels
// exist. Remaining labels are compacted to stay contiguous.
CorrelationTable merge_outcomes(const CorrelationTable& table, MergeParty party,
                                int from, int into);

// Transports probability mass along the given outcome maps. Non-injective
// maps merge mass; the output scenario's outcome counts are the largest
// image labels.
CorrelationTable relabel(const CorrelationTable& table, const Relabeling& maps);

struct NonsignalingCheck {
    bool ok;
    double worst_deviation;
};

// True iff every Alice marginal is independent of Bob's setting and vice
// versa, within tol.
NonsignalingCheck check_nonsignaling(const CorrelationTable& table, double tol = 1e-9);

}  // namespace polybell
