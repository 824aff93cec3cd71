#pragma once

#include <string>
#include <utility>
#include <vector>

namespace polybell {

// One entry of a symmetric matrix; row <= col, the mirrored entry is implied.
struct SdpCell {
    int row, col;
    double value;
};

// Affine linear matrix inequality problem:
//   maximize objective_constant + objective . y
//   subject to M(y) = fixed + sum_i y_i * entries[i]  >=  0 (psd)
//   and the optional extra linear equalities on y.
// Cells not covered by `fixed` or any variable are zero.
struct SdpProblem {
    int dimension = 0;
    std::vector<SdpCell> fixed;
    std::vector<std::vector<SdpCell>> entries;  // one cell list per variable
    std::vector<double> objective;              // one coefficient per variable
    double objective_constant = 0.0;

    struct Equality {
        std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
        double rhs;
    };
    std::vector<Equality> equalities;

    std::vector<std::string> variable_names;  // optional, same length as entries

    int num_vars() const { return static_cast<int>(entries.size()); }
    void validate() const;
};

}  // namespace polybell
