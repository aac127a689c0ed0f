// End-to-end drive of the articulation pipeline through the public API:
// synthesize a two-state door scene, harmonize mask labels, lift and filter
// correspondences, train the motion field, and check the recovered hinge
// against ground truth. Exits nonzero on any miss.
#include <cstdio>
#include <cmath>

#include "artic/seg.hpp"
#include "artic/synth.hpp"
#include "artic/trainer.hpp"

using namespace artic;

int main() {
  SceneSpec spec = preset_scene("door2");
  spec.seed = 555;
  SceneData data = generate_scene(spec);

  ConsistentScene scene = harmonize_labels(data.frames0, data.frames1, data.matches);
  LiftResult lifted = lift_all(data.matches, scene.frames0, scene.frames1);
  std::vector<char> keep = locality_filter(lifted.pairs);
  std::vector<MatchPair> pairs;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i]) pairs.push_back(lifted.pairs[i]);
  std::printf("matches: %zu lifted, %zu kept\n", lifted.pairs.size(), pairs.size());

  TrainConfig cfg;
  cfg.seed = 1;
  TrainResult res = train_model(scene, pairs, cfg);

  // Ground truth for the single movable part, oriented canonical -> other
  // along the signed joint direction, the way the trainer saw it.
  const GtJoint& gt = data.joints[0];
  double gt_mag = std::abs(gt.mag1 - gt.mag0);
  JointParams gt_j;
  gt_j.kind = gt.kind;
  gt_j.axis_dir = gt.axis;
  gt_j.axis_origin = gt.origin;
  gt_j.magnitude =
      spec.parts[1].direction *
      (res.model.canonical_state == 0 ? gt.mag1 - gt.mag0 : gt.mag0 - gt.mag1);
  gt_j = decompose_joint(compose_joint(gt_j), JointKind::revolute);

  const MotionBasis& b = res.model.field.bases[1];
  if (b.prismatic_locked) { std::printf("FAIL: hinge locked prismatic\n"); return 1; }
  JointParams est_j = decompose_joint({b.rot.normalized(), b.trans}, JointKind::revolute);

  double axis_dot = std::abs(est_j.axis_dir.dot(gt_j.axis_dir));
  double axis_err_deg = rad_to_deg(std::acos(std::min(1.0, axis_dot)));
  Vec3 cross = est_j.axis_dir.cross(gt_j.axis_dir);
  Vec3 d0 = gt_j.axis_origin - est_j.axis_origin;
  double pos_err = cross.norm() < 1e-9
                       ? (d0 - d0.dot(gt_j.axis_dir) * gt_j.axis_dir).norm()
                       : std::abs(d0.dot(cross)) / cross.norm();
  double mag_err_deg = rad_to_deg(std::abs(est_j.magnitude - gt_mag));

  std::printf("axis error: %.4f deg (tol 0.5)\n", axis_err_deg);
  std::printf("axis position error: %.5f m (tol 0.005)\n", pos_err);
  std::printf("magnitude error: %.4f deg (tol 0.5), est %.3f vs gt %.3f deg\n",
              mag_err_deg, rad_to_deg(est_j.magnitude), rad_to_deg(gt_mag));

  bool ok = axis_err_deg < 0.5 && pos_err < 0.005 && mag_err_deg < 0.5;
  std::printf(ok ? "PASS\n" : "FAIL\n");
  return ok ? 0 : 1;
}
