#include "artic/geom.hpp"

namespace artic {

Camera look_at_camera(int width, int height, double fov_y_deg, const Vec3& eye,
                      const Vec3& target, const Vec3& up) {
  Vec3 fwd = (target - eye).normalized();
  Vec3 right = fwd.cross(up).normalized();
  Vec3 down = fwd.cross(right);  // +y in camera space points down the image
  Mat4 extr = Mat4::Identity();
  extr.block<1, 3>(0, 0) = right.transpose();
  extr.block<1, 3>(1, 0) = down.transpose();
  extr.block<1, 3>(2, 0) = fwd.transpose();
  extr.block<3, 1>(0, 3) = -extr.block<3, 3>(0, 0) * eye;
  double fy = 0.5 * height / std::tan(0.5 * deg_to_rad(fov_y_deg));
  return Camera(width, height, fy, fy, 0.5 * width, 0.5 * height, extr);
}

JointParams decompose_joint(const RigidMotion& motion,
                            std::optional<JointKind> kind_hint,
                            double prismatic_threshold_deg) {
  Quat q = motion.rot.normalized();
  double theta = q.angle();
  double tnorm = motion.trans.norm();
  if (theta < 1e-6 && tnorm < 1e-9)
    throw DegenerateJointError("decompose_joint: motion is indistinguishable from identity");

  bool revolute;
  if (kind_hint.has_value())
    revolute = (*kind_hint == JointKind::revolute);
  else
    revolute = theta > deg_to_rad(prismatic_threshold_deg);

  JointParams jp;
  if (revolute) {
    jp.kind = JointKind::revolute;
    jp.magnitude = theta;
    jp.axis_dir = q.axis();
    // t = (I - R) o; the null space of (I - R) is the axis, so the
    // least-squares pseudoinverse solution is the minimum-norm origin.
    Mat3 a = Mat3::Identity() - q.to_matrix();
    Eigen::JacobiSVD<Mat3> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-9);
    jp.axis_origin = svd.solve(motion.trans);
  } else {
    jp.kind = JointKind::prismatic;
    if (tnorm < 1e-12)
      throw DegenerateJointError("decompose_joint: prismatic motion with zero translation");
    jp.magnitude = tnorm;
    jp.axis_dir = motion.trans / tnorm;
    jp.axis_origin = Vec3::Zero();
  }
  return jp;
}

RigidMotion compose_joint(const JointParams& params) {
  if (params.kind == JointKind::revolute) {
    Quat q = Quat::from_axis_angle(params.axis_dir, params.magnitude);
    Mat3 r = q.to_matrix();
    return RigidMotion(q, (Mat3::Identity() - r) * params.axis_origin);
  }
  return RigidMotion(Quat::identity(), params.magnitude * params.axis_dir.normalized());
}

}  // namespace artic
