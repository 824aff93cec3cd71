#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "polybell/correlation.hpp"
#include "polybell/expression.hpp"
#include "polybell/quantum_model.hpp"

namespace polybell {

struct insufficient_data : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct no_violation_possible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Event counts per (a_setting, b_setting, a_outcome, b_outcome).
struct CountData {
    Scenario scenario;
    std::vector<std::vector<long long>> counts;  // same block layout as CorrelationTable

    static CountData zeros(const Scenario& scenario);
    long long& at(int a_set, int b_set, int a_out, int b_out);
    long long at(int a_set, int b_set, int a_out, int b_out) const;
    long long block_total(int a_set, int b_set) const;
};

// CSV with header a_setting,b_setting,a_outcome,b_outcome,count; missing
// rows are zero.
CountData load_counts_csv(const std::string& path, const Scenario& scenario);
CountData parse_counts_csv(std::istream& in, const Scenario& scenario);

// Correlations of the model with its state replaced by the maximally mixed
// state of the same total dimension.
CorrelationTable white_noise_correlations(const QuantumModel& model);

struct VisibilityReport {
    std::string expression;
    std::string bound_name;
    double bound;
    double target_value;
    double white_value;
    double threshold;          // v* with v*.target + (1-v*).white = bound
    bool exceeds;              // target is on the violating side of the bound
};

// Minimal weight of the target correlations in a mixture with the white-noise
// correlations such that the bound is still violated.
VisibilityReport visibility_threshold(const BellExpression& expr,
                                      const CorrelationTable& target,
                                      const CorrelationTable& white, double bound,
                                      const std::string& bound_name = "");

struct CountEvaluation {
    double value;
    double sigma;   // delta-method standard deviation, independent blocks
    long long total_events;
};

// Plug-in estimate of the expression from counts plus its standard deviation
// from independent multinomial statistics per setting pair.
CountEvaluation evaluate_counts(const BellExpression& expr, const CountData& data);

}  // namespace polybell
