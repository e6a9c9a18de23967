#pragma once

#include <Eigen/Dense>

#include <limits>
#include <utility>
#include <vector>

namespace bhsim {

struct Assignment {
    std::vector<std::pair<int, int>> matches;  // (row, column), ascending row
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
    double total_cost = 0.0;  // over `matches`, summed in row order
};

/// Minimum-cost assignment on a rectangular matrix.
///
/// The matrix is padded to square with a sentinel larger than every real
/// cost and the gate, solved with the O(n^3) shortest-augmenting-path
/// Hungarian method, and padded pairs are dropped. Pairs whose cost exceeds
/// `gate` are then demoted to unmatched on both sides.
Assignment solve_assignment(const Eigen::MatrixXd& cost,
                            double gate = std::numeric_limits<double>::infinity());

}  // namespace bhsim
