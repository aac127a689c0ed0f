#include "artic/checks.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "artic/error.hpp"

namespace artic::checks {

double brute_force_max_matching(const Eigen::MatrixXd& score, std::vector<int>& rowsol) {
  const int rows = int(score.rows()), cols = int(score.cols());
  if (rows > 8 || cols > 8)
    throw InvalidInputError("brute_force_max_matching: matrix too large");
  // Permute column choices over the larger side so every injection is seen.
  const int n = std::max(rows, cols);
  std::vector<int> perm(std::size_t(n), 0);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  std::vector<int> best_sol(std::size_t(rows), -1);
  do {
    double w = 0.0;
    for (int i = 0; i < rows; ++i) {
      int j = perm[std::size_t(i)];
      if (j < cols) w += score(i, j);
    }
    if (w > best) {
      best = w;
      for (int i = 0; i < rows; ++i) {
        int j = perm[std::size_t(i)];
        best_sol[std::size_t(i)] = j < cols ? j : -1;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  rowsol = best_sol;
  return best;
}

double brute_force_directed_sq_nn(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty())
    throw InvalidInputError("brute_force_directed_sq_nn: empty point set");
  double sum = 0.0;
  for (const Vec3& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : b) best = std::min(best, (p - q).squaredNorm());
    sum += best;
  }
  return sum / double(a.size());
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw InvalidInputError("adjusted_rand_index: labelings must be nonempty and equal length");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ca, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    ca[a[i]] += 1;
    cb[b[i]] += 1;
  }
  auto choose2 = [](double n) { return n * (n - 1) / 2.0; };
  double sum_joint = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (auto& [k, v] : joint) sum_joint += choose2(v);
  for (auto& [k, v] : ca) sum_a += choose2(v);
  for (auto& [k, v] : cb) sum_b += choose2(v);
  double total = choose2(double(a.size()));
  double expected = sum_a * sum_b / total;
  double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both labelings trivial
  return (sum_joint - expected) / (max_index - expected);
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

double gradient_rel_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& fd,
                          double abs_floor) {
  if (analytic.size() != fd.size())
    throw InvalidInputError("gradient_rel_error: size mismatch");
  double worst = 0.0;
  for (int i = 0; i < analytic.size(); ++i) {
    double denom = std::max({std::abs(analytic(i)), std::abs(fd(i)), abs_floor});
    worst = std::max(worst, std::abs(analytic(i) - fd(i)) / denom);
  }
  return worst;
}

}  // namespace artic::checks
