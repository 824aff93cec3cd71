#include "polybell/lp.hpp"

#include <algorithm>
#include <cmath>

namespace polybell {

void LinearProgram::add_equality(const std::vector<std::pair<int, double>>& coeffs,
                                 double rhs) {
    for (const auto& [var, c] : coeffs)
        if (var < 0 || var >= n_) throw std::invalid_argument("variable index out of range");
    rows_.push_back(coeffs);
    rhs_.push_back(rhs);
}

namespace {
constexpr double kEps = 1e-9;
constexpr double kPivotEps = 1e-11;
}  // namespace

LinearProgram::Solution LinearProgram::maximize() const {
    const int m = static_cast<int>(rows_.size());
    const int n = n_;
    const int ncols = n + m;  // original vars + one artificial per row

    std::vector<std::vector<double>> tab(m, std::vector<double>(ncols + 1, 0.0));
    for (int i = 0; i < m; ++i) {
        for (const auto& [var, c] : rows_[i]) tab[i][var] += c;
        tab[i][ncols] = rhs_[i];
        if (tab[i][ncols] < 0.0)
            for (double& v : tab[i]) v = -v;
        tab[i][n + i] = 1.0;
    }
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;
    std::vector<bool> row_alive(m, true);

    auto pivot = [&](int row, int col) {
        const double piv = tab[row][col];
        for (double& v : tab[row]) v /= piv;
        for (int r = 0; r < m; ++r) {
            if (r == row || !row_alive[r]) continue;
            const double f = tab[r][col];
            if (f == 0.0) continue;
            for (int j = 0; j <= ncols; ++j) tab[r][j] -= f * tab[row][j];
        }
        basis[row] = col;
    };

    // Simplex with Bland's rule; `limit_col` restricts the entering columns.
    auto run = [&](const std::vector<double>& obj, int limit_col) {
        const long max_iter = 20000L + 200L * (n + m);
        for (long iter = 0; iter < max_iter; ++iter) {
            int enter = -1;
            for (int j = 0; j < limit_col; ++j) {
                bool is_basic = false;
                for (int i = 0; i < m; ++i)
                    if (row_alive[i] && basis[i] == j) { is_basic = true; break; }
                if (is_basic) continue;
                double rc = obj[j];
                for (int i = 0; i < m; ++i)
                    if (row_alive[i]) rc -= obj[basis[i]] * tab[i][j];
                if (rc > kEps) { enter = j; break; }
            }
            if (enter < 0) return;

            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                if (!row_alive[i] || tab[i][enter] <= kPivotEps) continue;
                const double ratio = tab[i][ncols] / tab[i][enter];
                if (leave < 0 || ratio < best_ratio - kPivotEps ||
                    (std::abs(ratio - best_ratio) <= kPivotEps && basis[i] < basis[leave]))
                    { leave = i; best_ratio = ratio; }
            }
            if (leave < 0) throw solver_error("linear program is unbounded");
            pivot(leave, enter);
        }
        throw solver_error("simplex iteration limit exceeded");
    };

    // Phase 1: drive the artificial variables to zero.
    std::vector<double> obj1(ncols, 0.0);
    for (int j = n; j < ncols; ++j) obj1[j] = -1.0;
    run(obj1, ncols);
    double art_sum = 0.0;
    for (int i = 0; i < m; ++i)
        if (row_alive[i] && basis[i] >= n) art_sum += tab[i][ncols];
    if (art_sum > 1e-7) throw solver_error("linear program is infeasible");

    // Remove leftover artificials from the basis; all-zero rows are redundant.
    for (int i = 0; i < m; ++i) {
        if (!row_alive[i] || basis[i] < n) continue;
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(tab[i][j]) > 1e-8) { col = j; break; }
        if (col >= 0)
            pivot(i, col);
        else
            row_alive[i] = false;
    }

    // Phase 2 on the original objective.
    std::vector<double> obj2(ncols, 0.0);
    for (int j = 0; j < n; ++j) obj2[j] = c_[j];
    run(obj2, n);

    Solution sol;
    sol.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (row_alive[i] && basis[i] < n) sol.x[basis[i]] = tab[i][ncols];
    sol.value = 0.0;
    for (int j = 0; j < n; ++j) sol.value += c_[j] * sol.x[j];
    return sol;
}

}  // namespace polybell
