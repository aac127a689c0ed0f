#include "artic/motion_field.hpp"

namespace artic {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits, double temperature) {
  if (logits.size() == 0) throw InvalidInputError("softmax: empty logits");
  if (!(temperature > 0.0)) throw InvalidInputError("softmax: temperature must be positive");
  Eigen::VectorXd z = logits / temperature;
  double m = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - m).exp();
  return e / e.sum();
}

BlendedMotion soft_blend(const MotionField& field, const Eigen::VectorXd& weights) {
  if (weights.size() != field.n_parts())
    throw InvalidInputError("soft_blend: weight count does not match basis count");
  BlendedMotion out;
  out.linear = Mat3::Zero();
  out.trans = Vec3::Zero();
  for (int j = 0; j < field.n_parts(); ++j) {
    const MotionBasis& b = field.bases[std::size_t(j)];
    out.linear += weights(j) * b.rot.to_matrix();
    out.trans += weights(j) * b.trans;
  }
  return out;
}

int hard_assign(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) throw InvalidInputError("hard_assign: empty logits");
  int best = 0;
  for (int j = 1; j < logits.size(); ++j)
    if (logits(j) > logits(best)) best = j;
  return best;
}

Eigen::VectorXd init_logits(int part_label, int n_parts, double gap) {
  if (part_label < 0 || part_label >= n_parts)
    throw InvalidInputError("init_logits: part label out of range");
  Eigen::VectorXd l = Eigen::VectorXd::Zero(n_parts);
  l(part_label) = gap;
  return l;
}

std::vector<int> detect_prismatic(MotionField& field, double eps_deg) {
  std::vector<int> locked;
  for (int j = 1; j < field.n_parts(); ++j) {
    MotionBasis& b = field.bases[std::size_t(j)];
    if (b.prismatic_locked) continue;
    if (rad_to_deg(b.rot.normalized().angle()) < eps_deg) {
      b.rot = Quat::identity();
      b.prismatic_locked = true;
      locked.push_back(j);
    }
  }
  return locked;
}

}  // namespace artic
