#pragma once

#include <functional>
#include <vector>

#include "artic/geom.hpp"

// Verification-support routines: independent reference implementations used
// by the test suites and the selftest command. Everything here is brute
// force or numeric on purpose; none of it shares code with the paths it is
// meant to check.

namespace artic::checks {

/// Maximum-weight one-to-one matching by exhaustive permutation search.
/// Supports matrices up to 8x8. Returns the best total weight; rowsol[i]
/// holds the matched column or -1.
double brute_force_max_matching(const Eigen::MatrixXd& score, std::vector<int>& rowsol);

/// Mean of squared nearest-neighbor distances from a to b, by exhaustive
/// search.
double brute_force_directed_sq_nn(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

/// Adjusted Rand index between two labelings of the same items.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// Central finite-difference gradient of f at x.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h = 1e-5);

/// Max relative error between an analytic gradient and its finite-difference
/// estimate, with an absolute floor for near-zero entries.
double gradient_rel_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& fd,
                          double abs_floor = 1e-7);

}  // namespace artic::checks
