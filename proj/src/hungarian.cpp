#include "artic/hungarian.hpp"

#include <limits>

#include "artic/error.hpp"

namespace artic {

double hungarian_min_cost(const Eigen::MatrixXd& cost, std::vector<int>& rowsol) {
  const int n = int(cost.rows());
  if (cost.cols() != n) throw InvalidInputError("hungarian_min_cost: matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; p[j] = row currently matched to column j.
  std::vector<double> u(std::size_t(n) + 1, 0.0), v(std::size_t(n) + 1, 0.0);
  std::vector<int> p(std::size_t(n) + 1, 0), way(std::size_t(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(std::size_t(n) + 1, inf);
    std::vector<char> used(std::size_t(n) + 1, 0);
    do {
      used[std::size_t(j0)] = 1;
      int i0 = p[std::size_t(j0)], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[std::size_t(j)]) continue;
        double cur = cost(i0 - 1, j - 1) - u[std::size_t(i0)] - v[std::size_t(j)];
        if (cur < minv[std::size_t(j)]) {
          minv[std::size_t(j)] = cur;
          way[std::size_t(j)] = j0;
        }
        if (minv[std::size_t(j)] < delta) {
          delta = minv[std::size_t(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[std::size_t(j)]) {
          u[std::size_t(p[std::size_t(j)])] += delta;
          v[std::size_t(j)] -= delta;
        } else {
          minv[std::size_t(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[std::size_t(j0)] != 0);
    do {
      int j1 = way[std::size_t(j0)];
      p[std::size_t(j0)] = p[std::size_t(j1)];
      j0 = j1;
    } while (j0);
  }
  rowsol.assign(std::size_t(n), -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[std::size_t(j)] > 0) rowsol[std::size_t(p[std::size_t(j)] - 1)] = j - 1;
  }
  for (int i = 0; i < n; ++i) total += cost(i, rowsol[std::size_t(i)]);
  return total;
}

std::vector<WeightedPair> max_weight_matching(const Eigen::MatrixXd& score) {
  const int rows = int(score.rows()), cols = int(score.cols());
  std::vector<WeightedPair> out;
  if (rows == 0 || cols == 0) return out;
  if (score.minCoeff() < 0.0)
    throw InvalidInputError("max_weight_matching: scores must be nonnegative");
  const int n = std::max(rows, cols);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
  cost.topLeftCorner(rows, cols) = -score;
  std::vector<int> rowsol;
  hungarian_min_cost(cost, rowsol);
  for (int i = 0; i < rows; ++i) {
    int j = rowsol[std::size_t(i)];
    if (j >= 0 && j < cols && score(i, j) > 0.0)
      out.push_back(WeightedPair{i, j, score(i, j)});
  }
  return out;
}

}  // namespace artic
