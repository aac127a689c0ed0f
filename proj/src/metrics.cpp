#include "artic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "artic/error.hpp"
#include "artic/kdtree.hpp"

namespace artic {

namespace {

Vec3 unit_axis(const JointParams& j, const char* who) {
  double n = j.axis_dir.norm();
  if (n < 1e-12) throw InvalidInputError(std::string(who) + ": zero axis direction");
  return j.axis_dir / n;
}

}  // namespace

double metric_axis_angle(const JointParams& est, const JointParams& gt) {
  Vec3 a = unit_axis(est, "metric_axis_angle");
  Vec3 b = unit_axis(gt, "metric_axis_angle");
  double d = std::min(1.0, std::abs(a.dot(b)));
  return rad_to_deg(std::acos(d));
}

std::optional<double> metric_axis_pos(const JointParams& est, const JointParams& gt) {
  if (est.kind == JointKind::prismatic || gt.kind == JointKind::prismatic) return std::nullopt;
  Vec3 a = unit_axis(est, "metric_axis_pos");
  Vec3 b = unit_axis(gt, "metric_axis_pos");
  Vec3 d = gt.axis_origin - est.axis_origin;
  Vec3 cross = a.cross(b);
  double cn = cross.norm();
  // Near-parallel lines: the common-perpendicular direction degenerates,
  // so fall back to point-to-line distance, which is exact there.
  if (cn < 1e-9) return (d - d.dot(b) * b).norm();
  return std::abs(d.dot(cross)) / cn;
}

MotionError metric_part_motion(const JointParams& est, const JointParams& gt) {
  MotionError out;
  if (est.kind != gt.kind) {
    out.kind_mismatch = true;
    return out;
  }
  double diff = std::abs(est.magnitude - gt.magnitude);
  out.value = gt.kind == JointKind::revolute ? rad_to_deg(diff) : diff;
  return out;
}

double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b, bool root) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [root](const std::vector<Vec3>& from, const KdTree& tree) {
    double sum = 0.0;
    for (const Vec3& p : from) {
      double d2 = (tree.point(tree.nearest(p)) - p).squaredNorm();
      sum += root ? std::sqrt(d2) : d2;
    }
    return sum / double(from.size());
  };
  KdTree tree_a(a), tree_b(b);
  return 0.5 * (directed(a, tree_b) + directed(b, tree_a)) * 1000.0;
}

}  // namespace artic
