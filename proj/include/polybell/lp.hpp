#pragma once

#include <stdexcept>
#include <vector>

namespace polybell {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense linear program in equality standard form:
//   maximize c.x  subject to  A x = b,  x >= 0.
// Solved with a two-phase primal simplex (Bland's rule on stall), which
// returns exact vertex solutions up to floating-point rounding.
class LinearProgram {
  public:
    explicit LinearProgram(int num_vars) : n_(num_vars), c_(num_vars, 0.0) {}

    int num_vars() const { return n_; }
    void set_objective(int var, double coeff) { c_[var] = coeff; }

    // Adds the constraint sum_i coeffs[i].second * x_{coeffs[i].first} = rhs.
    void add_equality(const std::vector<std::pair<int, double>>& coeffs, double rhs);

    struct Solution {
        double value;
        std::vector<double> x;
    };

    // Throws solver_error on infeasibility or failure to converge.
    Solution maximize() const;

  private:
    int n_;
    std::vector<double> c_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
    std::vector<double> rhs_;
};

}  // namespace polybell
