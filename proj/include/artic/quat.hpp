#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace artic {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

/// Quaternion stored (w, x, y, z). Rotation formulas divide by the squared
/// norm, so rotate()/to_matrix() are smooth functions of all four components
/// and agree with the unit-quaternion formulas when |q| = 1. That keeps
/// finite differences of raw components consistent with rotate_jacobian().
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  Quat() = default;
  Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quat identity() { return Quat(); }

  static Quat from_axis_angle(const Vec3& axis, double angle_rad) {
    Vec3 u = axis.normalized();
    double h = 0.5 * angle_rad;
    double s = std::sin(h);
    return Quat(std::cos(h), s * u.x(), s * u.y(), s * u.z());
  }

  double squared_norm() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(squared_norm()); }

  Quat normalized() const {
    double n = norm();
    return Quat(w / n, x / n, y / n, z / n);
  }

  Quat conjugate() const { return Quat(w, -x, -y, -z); }

  Vec3 vec() const { return Vec3(x, y, z); }

  Vec4 coeffs() const { return Vec4(w, x, y, z); }

  /// Hamilton product.
  Quat operator*(const Quat& r) const {
    return Quat(w * r.w - x * r.x - y * r.y - z * r.z,
                w * r.x + x * r.w + y * r.z - z * r.y,
                w * r.y - x * r.z + y * r.w + z * r.x,
                w * r.z + x * r.y - y * r.x + z * r.w);
  }

  /// R(q) v = v + (2/|q|^2) (u x (u x v) + w (u x v)), u = (x,y,z).
  Vec3 rotate(const Vec3& v) const {
    Vec3 u = vec();
    Vec3 c = u.cross(v);
    return v + (2.0 / squared_norm()) * (u.cross(c) + w * c);
  }

  Mat3 to_matrix() const {
    double n = squared_norm();
    double s = 2.0 / n;
    Mat3 m;
    m << 1 - s * (y * y + z * z), s * (x * y - w * z), s * (x * z + w * y),
        s * (x * y + w * z), 1 - s * (x * x + z * z), s * (y * z - w * x),
        s * (x * z - w * y), s * (y * z + w * x), 1 - s * (x * x + y * y);
    return m;
  }

  /// Rotation angle in [0, pi] of the normalized quaternion.
  double angle() const {
    double vn = vec().norm();
    return 2.0 * std::atan2(vn, std::abs(w));
  }

  /// Rotation axis; sign chosen so the angle about it is nonnegative.
  /// Undefined direction for near-identity rotations (returns +x then).
  Vec3 axis() const {
    Vec3 u = vec();
    double vn = u.norm();
    if (vn < 1e-15) return Vec3(1, 0, 0);
    return (w < 0.0 ? -1.0 : 1.0) * u / vn;
  }
};

inline Quat quat_from_matrix(const Mat3& m) {
  // Shepperd's method: branch on the largest diagonal term.
  double tr = m.trace();
  Quat q;
  if (tr > 0.0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    q = Quat(0.25 * s, (m(2, 1) - m(1, 2)) / s, (m(0, 2) - m(2, 0)) / s,
             (m(1, 0) - m(0, 1)) / s);
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
    q = Quat((m(2, 1) - m(1, 2)) / s, 0.25 * s, (m(0, 1) + m(1, 0)) / s,
             (m(0, 2) + m(2, 0)) / s);
  } else if (m(1, 1) > m(2, 2)) {
    double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
    q = Quat((m(0, 2) - m(2, 0)) / s, (m(0, 1) + m(1, 0)) / s, 0.25 * s,
             (m(1, 2) + m(2, 1)) / s);
  } else {
    double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
    q = Quat((m(1, 0) - m(0, 1)) / s, (m(0, 2) + m(2, 0)) / s,
             (m(1, 2) + m(2, 1)) / s, 0.25 * s);
  }
  return q.normalized();
}

/// Value and Jacobian of p(q) = R(q) v with respect to (w, x, y, z),
/// using the same |q|^2-normalized formula as Quat::rotate.
inline Vec3 rotate_with_jacobian(const Quat& q, const Vec3& v, Mat34* jac) {
  Vec3 u = q.vec();
  double n = q.squared_norm();
  Vec3 c = u.cross(v);       // u x v
  Vec3 d = u.cross(c);       // u x (u x v)
  Vec3 g = d + q.w * c;      // the 2/n-scaled part
  Vec3 out = v + (2.0 / n) * g;
  if (jac) {
    // d/dw: (2/n) c - (4w/n^2) g
    jac->col(0) = (2.0 / n) * c - (4.0 * q.w / (n * n)) * g;
    for (int k = 0; k < 3; ++k) {
      Vec3 ek = Vec3::Zero();
      ek(k) = 1.0;
      Vec3 dc = ek.cross(v);
      Vec3 dg = ek.cross(c) + u.cross(dc) + q.w * dc;
      jac->col(k + 1) = (2.0 / n) * dg - (4.0 * u(k) / (n * n)) * g;
    }
  }
  return out;
}

}  // namespace artic
