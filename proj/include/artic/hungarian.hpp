#pragma once

#include <Eigen/Dense>
#include <vector>

namespace artic {

/// Minimum-cost perfect assignment on a square cost matrix (potentials /
/// shortest augmenting path, O(n^3)). rowsol[i] receives the column matched
/// to row i. Returns the total cost.
double hungarian_min_cost(const Eigen::MatrixXd& cost, std::vector<int>& rowsol);

struct WeightedPair {
  int row = 0, col = 0;
  double weight = 0.0;
};

/// Maximum-weight one-to-one matching on a rectangular nonnegative score
/// matrix. Rows/columns beyond min(n, m) may stay unmatched; pairs matched
/// against zero padding are dropped.
std::vector<WeightedPair> max_weight_matching(const Eigen::MatrixXd& score);

}  // namespace artic
