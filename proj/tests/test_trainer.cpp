#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "artic/error.hpp"
#include "artic/kdtree.hpp"
#include "artic/synth.hpp"
#include "artic/trainer.hpp"

using namespace artic;

namespace {

/// ConsistentScene built from generator ground truth: per-view labels are
/// mapped back to the global part ids through each frame's recorded
/// permutation, bypassing the mask-consistency stage tested elsewhere.
ConsistentScene gt_consistent(const SceneData& data) {
  ConsistentScene out;
  out.n_parts = int(data.spec.parts.size());
  auto relabel = [](const std::vector<Frame>& frames) {
    std::vector<Frame> fixed = frames;
    for (Frame& f : fixed) {
      for (std::uint16_t& l : f.label.data)
        l = l == 0 ? 0 : std::uint16_t(f.label_to_gt[std::size_t(l)]);
      f.label_to_gt.clear();
    }
    return fixed;
  };
  out.frames0 = relabel(data.frames0);
  out.frames1 = relabel(data.frames1);
  return out;
}

/// Lift, locality-filter, and keep surviving cross-state matches.
std::vector<MatchPair> filtered_matches(const SceneData& data,
                                        const ConsistentScene& scene) {
  LiftResult lifted = lift_all(data.matches, scene.frames0, scene.frames1);
  std::vector<char> keep = locality_filter(lifted.pairs);
  std::vector<MatchPair> out;
  for (std::size_t i = 0; i < lifted.pairs.size(); ++i)
    if (keep[i]) out.push_back(lifted.pairs[i]);
  return out;
}

TrainConfig quick_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.n_points = 1200;
  cfg.iters_warmup = 40;
  cfg.iters_soft = 120;
  cfg.prismatic_check_step = 90;
  cfg.iters_hard = 200;
  return cfg;
}

double quat_angle(const Quat& q) {
  Quat n = q.normalized();
  return 2.0 * std::atan2(n.vec().norm(), std::abs(n.w));
}

}  // namespace

TEST_CASE("canonical state is the one with more movable mask area") {
  Image<std::uint16_t> big(8, 8, 2), small(8, 8, 1);
  small.at(0, 0) = 2;
  Frame f_big, f_small;
  f_big.label = big;
  f_small.label = small;

  CHECK(pick_canonical_state({f_small}, {f_big}) == 1);
  CHECK(pick_canonical_state({f_big}, {f_small}) == 0);
  // Ties go to state 0.
  CHECK(pick_canonical_state({f_big}, {f_big}) == 0);
  // Test frames do not count toward the area.
  Frame f_big_test = f_big;
  f_big_test.is_test = true;
  CHECK(pick_canonical_state({f_small}, {f_big_test, f_small}) == 0);
}

TEST_CASE("initialized primitives carry their source pixel's label and color") {
  SceneSpec spec = preset_scene("door2");
  spec.seed = 551;
  SceneData data = generate_scene(spec);
  ConsistentScene scene = gt_consistent(data);

  // A single source frame makes the pixel-of-origin recoverable by
  // projection, since backproject and project are mutually inverse.
  std::vector<Frame> one = {scene.frames0[0]};
  TrainConfig cfg;
  cfg.n_points = 800;
  SceneModel m = init_model(one, scene.n_parts, cfg);
  REQUIRE(m.n_prims() == 800);
  REQUIRE(m.n_parts() == 2);
  const Frame& f = one[0];
  for (const Primitive& p : m.prims) {
    auto pr = f.camera.project(p.center);
    REQUIRE(pr.has_value());
    int x = int(std::floor(pr->pixel.x())), y = int(std::floor(pr->pixel.y()));
    int label = f.label.at(x, y);
    CHECK(hard_assign(p.logits) == label - 1);
    CHECK((p.color - to_linear(f.rgb.at(x, y))).norm() == 0.0);
    CHECK(p.opacity == 0.9);
    CHECK(p.scale.x() > 0.0);
  }
  // KNN index is present, symmetric in size, and excludes self-loops.
  REQUIRE(m.knn.size() == m.prims.size());
  for (std::size_t i = 0; i < m.knn.size(); ++i) {
    CHECK(int(m.knn[i].size()) == cfg.knn_k);
    for (int j : m.knn[i]) CHECK(j != int(i));
  }
}

TEST_CASE("initialized centers lie on the observed surface") {
  SceneSpec spec = preset_scene("door2");
  spec.seed = 552;
  SceneData data = generate_scene(spec);
  ConsistentScene scene = gt_consistent(data);
  int canonical = pick_canonical_state(scene.frames0, scene.frames1);
  const auto& frames = canonical == 0 ? scene.frames0 : scene.frames1;
  const auto& fracs = canonical == 0 ? data.frac0 : data.frac1;

  TrainConfig cfg;
  cfg.n_points = 2000;
  SceneModel m = init_model(frames, scene.n_parts, cfg);

  Rng rng(99);
  std::vector<Vec3> gt = sample_surface(spec, part_poses(spec, fracs), -1, 20000, rng);
  KdTree tree(gt);
  double mean_d = 0.0;
  for (const Primitive& p : m.prims)
    mean_d += (p.center - tree.point(tree.nearest(p.center))).norm();
  mean_d /= double(m.n_prims());
  // Pixel footprint at the working distance bounds the sampling gap.
  const Camera& cam = frames[0].camera;
  double footprint = 2.9 / cam.fx();
  CHECK(mean_d < 2.0 * footprint);
}

TEST_CASE("init_model input validation") {
  TrainConfig cfg;
  CHECK_THROWS_AS(init_model({}, 2, cfg), InvalidInputError);

  Frame empty;
  empty.camera = look_at_camera(8, 8, 55.0, Vec3(0, 0, -2), Vec3::Zero());
  empty.rgb = Image<Rgb8>(8, 8);
  empty.depth = Image<float>(8, 8, 0.0f);
  empty.label = Image<std::uint16_t>(8, 8, 0);
  CHECK_THROWS_AS(init_model({empty}, 2, cfg), InvalidInputError);

  // Fewer labeled pixels than requested primitives: replacement + warning.
  Frame tiny = empty;
  tiny.depth = Image<float>(8, 8, 2.0f);
  for (int i = 0; i < 8; ++i) tiny.label.at(i, 3) = 1;
  std::vector<std::string> warn;
  TrainConfig small_cfg;
  small_cfg.n_points = 32;
  SceneModel m = init_model({tiny}, 2, small_cfg, &warn);
  CHECK(m.n_prims() == 32);
  REQUIRE(warn.size() == 1);
  CHECK(warn[0].find("replacement") != std::string::npos);
}

TEST_CASE("training is deterministic and keeps the static basis frozen") {
  SceneSpec spec = preset_scene("door2");
  spec.seed = 553;
  spec.n_views_train = 10;
  spec.n_views_test = 2;
  spec.matches_per_part = 120;
  SceneData data = generate_scene(spec);
  ConsistentScene scene = gt_consistent(data);
  std::vector<MatchPair> matches = filtered_matches(data, scene);
  REQUIRE(!matches.empty());

  TrainConfig cfg = quick_config(7);
  cfg.n_points = 600;
  cfg.iters_warmup = 20;
  cfg.iters_soft = 50;
  cfg.prismatic_check_step = 40;
  cfg.iters_hard = 60;
  TrainResult a = train_model(scene, matches, cfg);
  TrainResult b = train_model(scene, matches, cfg);

  REQUIRE(a.model.n_parts() == b.model.n_parts());
  for (int j = 0; j < a.model.n_parts(); ++j) {
    const MotionBasis& ba = a.model.field.bases[std::size_t(j)];
    const MotionBasis& bb = b.model.field.bases[std::size_t(j)];
    CHECK(ba.rot.coeffs() == bb.rot.coeffs());
    CHECK(ba.trans == bb.trans);
    CHECK(ba.prismatic_locked == bb.prismatic_locked);
  }
  for (int i = 0; i < a.model.n_prims(); ++i) {
    CHECK(a.model.prims[std::size_t(i)].logits == b.model.prims[std::size_t(i)].logits);
    CHECK(a.model.prims[std::size_t(i)].color == b.model.prims[std::size_t(i)].color);
  }
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t r = 0; r < a.log.size(); ++r)
    CHECK(a.log[r].total == b.log[r].total);

  // The static basis stays bit-identical to the identity.
  const MotionBasis& b0 = a.model.field.bases[0];
  CHECK(b0.rot.w == 1.0);
  CHECK(b0.rot.x == 0.0);
  CHECK(b0.rot.y == 0.0);
  CHECK(b0.rot.z == 0.0);
  CHECK(b0.trans == Vec3::Zero());

  // Log bookkeeping: contiguous steps and stage-appropriate zero terms.
  CHECK(int(a.log.size()) == cfg.iters_warmup + cfg.iters_soft + cfg.iters_hard);
  for (std::size_t r = 0; r < a.log.size(); ++r) {
    CHECK(a.log[r].step == int(r));
    CHECK(std::isfinite(a.log[r].total));
    if (a.log[r].stage == "warmup") {
      CHECK(a.log[r].sem == 0.0);
      CHECK(a.log[r].traj == 0.0);
    }
    if (a.log[r].stage == "soft") CHECK(a.log[r].traj == 0.0);
    if (a.log[r].stage == "hard") CHECK(a.log[r].sparsity == 0.0);
  }
}

TEST_CASE("zero-motion scene keeps all bases near identity") {
  SceneSpec spec = preset_scene("door2");
  spec.seed = 554;
  spec.parts[1].limit = 0.0;  // the door never moves between states
  SceneData data = generate_scene(spec);
  ConsistentScene scene = gt_consistent(data);
  std::vector<MatchPair> matches = filtered_matches(data, scene);

  TrainConfig cfg = quick_config(11);
  TrainResult r = train_model(scene, matches, cfg);
  for (int j = 1; j < r.model.n_parts(); ++j) {
    const MotionBasis& b = r.model.field.bases[std::size_t(j)];
    CHECK(quat_angle(b.rot) < 1e-3);
    CHECK(b.trans.norm() < 1e-3);
  }
}

TEST_CASE("door training recovers the hinge within tight tolerances") {
  SceneSpec spec = preset_scene("door2");
  spec.seed = 555;
  SceneData data = generate_scene(spec);
  ConsistentScene scene = gt_consistent(data);
  std::vector<MatchPair> matches = filtered_matches(data, scene);

  TrainConfig cfg;
  cfg.seed = 1;
  TrainResult r = train_model(scene, matches, cfg);
  REQUIRE(r.model.n_parts() == 2);
  const GtJoint& gt = data.joints[0];

  // Orient the ground-truth delta the same way the trainer saw it:
  // canonical -> other along the signed joint direction.
  double gt_mag = std::abs(gt.mag1 - gt.mag0);
  RigidMotion gt_motion;
  {
    JointParams jp;
    jp.kind = gt.kind;
    jp.axis_dir = gt.axis;
    jp.axis_origin = gt.origin;
    jp.magnitude = spec.parts[1].direction *
                   (r.model.canonical_state == 0 ? gt.mag1 - gt.mag0 : gt.mag0 - gt.mag1);
    gt_motion = compose_joint(jp);
  }

  const MotionBasis& b = r.model.field.bases[1];
  CHECK(!b.prismatic_locked);
  RigidMotion est(b.rot.normalized(), b.trans);
  JointParams est_j = decompose_joint(est, JointKind::revolute);
  JointParams gt_j = decompose_joint(gt_motion, JointKind::revolute);

  double axis_angle_deg =
      rad_to_deg(std::acos(std::min(1.0, std::abs(est_j.axis_dir.dot(gt_j.axis_dir)))));
  CHECK(axis_angle_deg < 0.5);

  // Minimum distance between the two axis lines.
  Vec3 cross = est_j.axis_dir.cross(gt_j.axis_dir);
  Vec3 d0 = gt_j.axis_origin - est_j.axis_origin;
  double axis_pos = cross.norm() < 1e-9
                        ? (d0 - d0.dot(gt_j.axis_dir) * gt_j.axis_dir).norm()
                        : std::abs(d0.dot(cross)) / cross.norm();
  CHECK(axis_pos < 0.005);

  double motion_err_deg = rad_to_deg(std::abs(est_j.magnitude - gt_mag));
  CHECK(motion_err_deg < 0.5);

  // Soft-stage totals: windowed means must be non-increasing, allowing the
  // occasional adaptive-moment transient.
  std::vector<double> soft_totals;
  for (const TrainLogRow& row : r.log)
    if (row.stage == "soft") soft_totals.push_back(row.total);
  REQUIRE(int(soft_totals.size()) == cfg.iters_soft);
  std::vector<double> window_means;
  for (std::size_t s = 0; s + 50 <= soft_totals.size(); s += 50) {
    double sum = 0.0;
    for (std::size_t k = s; k < s + 50; ++k) sum += soft_totals[k];
    window_means.push_back(sum / 50.0);
  }
  int violations = 0;
  for (std::size_t w = 0; w + 1 < window_means.size(); ++w)
    if (window_means[w + 1] > window_means[w]) ++violations;
  int transitions = int(window_means.size()) - 1;
  CHECK(violations <= (transitions + 19) / 20);  // ceil(5%)
}
