#include "bhsim/assignment.hpp"

#include "bhsim/core.hpp"

#include <algorithm>
#include <limits>

namespace bhsim {

namespace {

// Row -> column for a square matrix. Potentials-based Hungarian method
// (Kuhn-Munkres with Dijkstra-like augmentation), 1-indexed internally.
std::vector<int> hungarian_square(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace

Assignment solve_assignment(const Eigen::MatrixXd& cost, double gate) {
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());
    Assignment out;
    if (rows == 0 || cols == 0) {
        for (int i = 0; i < rows; ++i) out.unmatched_rows.push_back(i);
        for (int j = 0; j < cols; ++j) out.unmatched_cols.push_back(j);
        return out;
    }
    if (!cost.allFinite() || cost.minCoeff() < 0.0)
        throw PreconditionError("assignment costs must be finite and non-negative");

    const int n = std::max(rows, cols);
    double sentinel = cost.maxCoeff() + 1.0;
    if (std::isfinite(gate)) sentinel = std::max(sentinel, gate + 1.0);
    sentinel *= 2.0;
    Eigen::MatrixXd square = Eigen::MatrixXd::Constant(n, n, sentinel);
    square.topLeftCorner(rows, cols) = cost;

    const std::vector<int> row_to_col = hungarian_square(square);
    std::vector<char> col_used(cols, 0);
    for (int i = 0; i < rows; ++i) {
        const int j = row_to_col[i];
        if (j >= 0 && j < cols && cost(i, j) <= gate) {
            out.matches.emplace_back(i, j);
            out.total_cost += cost(i, j);
            col_used[j] = 1;
        } else {
            out.unmatched_rows.push_back(i);
        }
    }
    for (int j = 0; j < cols; ++j)
        if (!col_used[j]) out.unmatched_cols.push_back(j);
    return out;
}

}  // namespace bhsim
