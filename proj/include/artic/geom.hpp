#pragma once

#include <optional>
#include <vector>

#include "artic/error.hpp"
#include "artic/quat.hpp"

namespace artic {

/// Rigid transform x -> R x + t with the rotation stored as a quaternion.
struct RigidMotion {
  Quat rot;
  Vec3 trans = Vec3::Zero();

  RigidMotion() = default;
  RigidMotion(const Quat& q, const Vec3& t) : rot(q), trans(t) {}

  static RigidMotion identity() { return RigidMotion(); }

  Vec3 apply(const Vec3& p) const { return rot.rotate(p) + trans; }

  /// this o other (apply other first).
  RigidMotion compose(const RigidMotion& other) const {
    return RigidMotion((rot * other.rot).normalized(), rot.rotate(other.trans) + trans);
  }

  RigidMotion inverse() const {
    Quat qi = rot.conjugate().normalized();
    return RigidMotion(qi, -qi.rotate(trans));
  }

  Mat4 to_matrix() const {
    Mat4 m = Mat4::Identity();
    m.block<3, 3>(0, 0) = rot.to_matrix();
    m.block<3, 1>(0, 3) = trans;
    return m;
  }
};

/// One anisotropic Gaussian primitive in the canonical state.
struct Primitive {
  Vec3 center = Vec3::Zero();
  Quat rot;                       // orientation, |q| = 1
  Vec3 scale = Vec3::Ones();      // per-axis standard deviations, > 0
  double opacity = 0.9;
  Vec3 color = Vec3::Zero();      // linear rgb in [0, 1]
  Eigen::VectorXd logits;         // part-weight logits, one per part

  /// Sigma = R S S^T R^T.
  Mat3 covariance() const {
    Mat3 r = rot.to_matrix();
    return r * scale.cwiseProduct(scale).asDiagonal() * r.transpose();
  }
};

/// Transformed primitive: center moves rigidly, covariance conjugates,
/// appearance attributes are untouched.
inline Primitive apply_motion(const Primitive& p, const RigidMotion& m) {
  Primitive out = p;
  out.center = m.apply(p.center);
  out.rot = (m.rot * p.rot).normalized();
  return out;
}

struct Projection {
  Eigen::Vector2d pixel;  // continuous pixel coordinates, centers at (i+0.5)
  double depth = 0.0;     // camera-space z
};

/// Pinhole camera. Intrinsics are the upper-triangular K with positive
/// focals; extrinsics map world to camera space, camera looks along +z.
class Camera {
 public:
  Camera() = default;
  Camera(int width, int height, double fx, double fy, double cx, double cy,
         const Mat4& extrinsics)
      : width_(width), height_(height), fx_(fx), fy_(fy), cx_(cx), cy_(cy),
        extr_(extrinsics) {
    validate();
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  const Mat4& extrinsics() const { return extr_; }

  Mat3 intrinsic_matrix() const {
    Mat3 k = Mat3::Identity();
    k(0, 0) = fx_;
    k(1, 1) = fy_;
    k(0, 2) = cx_;
    k(1, 2) = cy_;
    return k;
  }

  /// World position of the optical center.
  Vec3 center() const {
    Mat3 r = extr_.block<3, 3>(0, 0);
    return -r.transpose() * extr_.block<3, 1>(0, 3);
  }

  Vec3 to_camera(const Vec3& x_world) const {
    return extr_.block<3, 3>(0, 0) * x_world + extr_.block<3, 1>(0, 3);
  }

  /// Not-visible (nullopt) when the point is not safely in front of the
  /// camera. The pixel may still fall outside the image bounds; clipping
  /// is the caller's concern.
  std::optional<Projection> project(const Vec3& x_world) const {
    Vec3 xc = to_camera(x_world);
    if (xc.z() <= 1e-6) return std::nullopt;
    Projection pr;
    pr.pixel = Eigen::Vector2d(fx_ * xc.x() / xc.z() + cx_, fy_ * xc.y() / xc.z() + cy_);
    pr.depth = xc.z();
    return pr;
  }

  Vec3 backproject(const Eigen::Vector2d& pixel, double depth) const {
    if (!(depth > 0.0)) throw InvalidInputError("backproject: depth must be positive");
    Vec3 xc((pixel.x() - cx_) / fx_ * depth, (pixel.y() - cy_) / fy_ * depth, depth);
    Mat3 r = extr_.block<3, 3>(0, 0);
    return r.transpose() * (xc - extr_.block<3, 1>(0, 3));
  }

  void validate() const {
    if (width_ <= 0 || height_ <= 0)
      throw InvalidInputError("camera: image dimensions must be positive");
    if (!(fx_ > 0.0) || !(fy_ > 0.0))
      throw InvalidInputError("camera: focal lengths must be positive");
    Mat3 r = extr_.block<3, 3>(0, 0);
    if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6)
      throw InvalidInputError("camera: extrinsic rotation is not orthonormal");
    if (std::abs(extr_(3, 0)) + std::abs(extr_(3, 1)) + std::abs(extr_(3, 2)) > 0.0 ||
        std::abs(extr_(3, 3) - 1.0) > 0.0)
      throw InvalidInputError("camera: extrinsics bottom row must be (0,0,0,1)");
  }

 private:
  int width_ = 0, height_ = 0;
  double fx_ = 1, fy_ = 1, cx_ = 0, cy_ = 0;
  Mat4 extr_ = Mat4::Identity();
};

/// Camera at `eye` looking at `target`; `up` resolves the roll.
Camera look_at_camera(int width, int height, double fov_y_deg, const Vec3& eye,
                      const Vec3& target, const Vec3& up = Vec3(0, 1, 0));

enum class JointKind { revolute, prismatic };

/// 1-DoF joint. Magnitude is nonnegative by convention; the axis direction
/// carries the sign. axis_origin is meaningful for revolute joints only.
struct JointParams {
  JointKind kind = JointKind::revolute;
  Vec3 axis_dir = Vec3::UnitZ();
  Vec3 axis_origin = Vec3::Zero();
  double magnitude = 0.0;  // radians or meters
};

/// Minimum-norm origin convention: decompose_joint returns the revolute
/// origin with no component along the axis.
JointParams decompose_joint(const RigidMotion& motion,
                            std::optional<JointKind> kind_hint = std::nullopt,
                            double prismatic_threshold_deg = 0.5);

RigidMotion compose_joint(const JointParams& params);

constexpr double kPi = 3.14159265358979323846;
inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace artic
