#pragma once

#include <vector>

#include "artic/geom.hpp"

namespace artic {

/// One per-part rigid motion basis mapping the canonical state to the other
/// observed state. prismatic_locked bases keep an identity rotation and must
/// not receive rotation updates.
struct MotionBasis {
  Quat rot;
  Vec3 trans = Vec3::Zero();
  bool prismatic_locked = false;
};

/// Bases indexed by part; index 0 is the static part and stays the identity
/// for the whole lifetime of the field.
struct MotionField {
  std::vector<MotionBasis> bases;

  static MotionField identity(int n_parts) {
    if (n_parts < 1) throw InvalidInputError("motion field needs at least one part");
    MotionField f;
    f.bases.resize(std::size_t(n_parts));
    return f;
  }

  int n_parts() const { return int(bases.size()); }

  RigidMotion motion_of(int part) const {
    const MotionBasis& b = bases.at(std::size_t(part));
    return RigidMotion(b.rot.normalized(), b.trans);
  }
};

/// Numerically stable softmax with temperature; exact one-hot in the limit
/// of a dominant logit.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits, double temperature = 1.0);

/// Weighted sum of basis rotation matrices and translations (the blended
/// map is generally not rigid). Weights must match the basis count.
struct BlendedMotion {
  Mat3 linear = Mat3::Identity();
  Vec3 trans = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return linear * p + trans; }
};

BlendedMotion soft_blend(const MotionField& field, const Eigen::VectorXd& weights);

/// Argmax over logits; ties break toward the lowest index.
int hard_assign(const Eigen::VectorXd& logits);

/// One-hot logits at the given part label, scaled by gap. softmax of the
/// result is the initial soft weight vector.
Eigen::VectorXd init_logits(int part_label, int n_parts, double gap = 1.0);

/// Lock every movable basis whose rotation angle is below eps_deg to an
/// identity rotation (prismatic). Returns the indices that were locked.
/// The static basis 0 is never touched.
std::vector<int> detect_prismatic(MotionField& field, double eps_deg);

}  // namespace artic
