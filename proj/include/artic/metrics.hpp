#pragma once

#include <optional>
#include <vector>

#include "artic/geom.hpp"

namespace artic {

/// Angle between two joint axis directions in degrees, ignoring sign:
/// an axis and its negation describe the same joint.
double metric_axis_angle(const JointParams& est, const JointParams& gt);

/// Minimum distance between the two axis lines in meters. The choice of
/// origin along either line does not matter. Prismatic joints have no
/// positioned axis, so any prismatic input yields nullopt.
std::optional<double> metric_axis_pos(const JointParams& est, const JointParams& gt);

/// Magnitude error in the joint's native unit: degrees for revolute,
/// meters for prismatic. A kind mismatch is its own failure mode and
/// carries no numeric value.
struct MotionError {
  bool kind_mismatch = false;
  double value = 0.0;
};
MotionError metric_part_motion(const JointParams& est, const JointParams& gt);

/// Symmetric chamfer distance: the two directed means of nearest-neighbor
/// distances, averaged, times 1000. Distances are squared by default (the
/// common point-cloud convention); `root` switches to plain Euclidean
/// means, making the unit an honest millimeter. Either side empty gives
/// +infinity; callers attach the warning.
double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b, bool root = false);

}  // namespace artic
