#include <doctest.h>

#include "artic/checks.hpp"
#include "artic/correspond.hpp"
#include "artic/rng.hpp"

using namespace artic;

namespace {

/// Frame looking at the plane n.x = d with exact per-pixel depth.
Frame plane_frame(const Camera& cam, const Vec3& n, double d, int view = 0) {
  Frame f;
  f.camera = cam;
  f.view = view;
  f.rgb = Image<Rgb8>(cam.width(), cam.height());
  f.depth = Image<float>(cam.width(), cam.height(), 0.0f);
  f.label = Image<std::uint16_t>(cam.width(), cam.height(), 1);
  Mat3 r = cam.extrinsics().block<3, 3>(0, 0);
  Vec3 c = cam.center();
  for (int y = 0; y < cam.height(); ++y)
    for (int x = 0; x < cam.width(); ++x) {
      Vec3 dir_cam((x + 0.5 - cam.cx()) / cam.fx(), (y + 0.5 - cam.cy()) / cam.fy(), 1.0);
      Vec3 dir = r.transpose() * dir_cam;  // world ray, z_cam = t
      double denom = n.dot(dir);
      if (std::abs(denom) < 1e-12) continue;
      double t = (d - n.dot(c)) / denom;
      if (t > 0.0) f.depth.at(x, y) = float(t);
    }
  return f;
}

Camera simple_camera(const Vec3& eye, const Vec3& target) {
  return look_at_camera(64, 64, 55.0, eye, target);
}

}  // namespace

TEST_CASE("lift recovers exact world points on a slanted plane") {
  Vec3 n = Vec3(0.2, -0.1, 1.0).normalized();
  double d = 2.0;
  Camera cam0 = simple_camera(Vec3(0, 0, 0), Vec3(0, 0, 1));
  Camera cam1 = simple_camera(Vec3(0.4, 0.2, -0.1), Vec3(0, 0, 1));
  Frame f0 = plane_frame(cam0, n, d, 0);
  Frame f1 = plane_frame(cam1, n, d, 1);

  Rng rng(41);
  std::vector<Eigen::Vector2d> pix0, pix1;
  std::vector<Vec3> expected;
  for (int i = 0; i < 200; ++i) {
    // A world point on the plane, seen by both cameras.
    Vec3 p(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 0.0);
    p.z() = (d - n.x() * p.x() - n.y() * p.y()) / n.z();
    auto pr0 = cam0.project(p);
    auto pr1 = cam1.project(p);
    REQUIRE(pr0.has_value());
    REQUIRE(pr1.has_value());
    if (pr0->pixel.minCoeff() < 2 || pr0->pixel.maxCoeff() > 62) continue;
    if (pr1->pixel.minCoeff() < 2 || pr1->pixel.maxCoeff() > 62) continue;
    pix0.push_back(pr0->pixel);
    pix1.push_back(pr1->pixel);
    expected.push_back(p);
  }
  REQUIRE(pix0.size() > 100);
  LiftResult lifted = lift_matches(pix0, pix1, f0, f1);
  CHECK(lifted.dropped == 0);
  REQUIRE(lifted.pairs.size() == pix0.size());
  for (std::size_t i = 0; i < lifted.pairs.size(); ++i) {
    // Static surface: both endpoints are the same physical point.
    CHECK((lifted.pairs[i].p0 - expected[i]).norm() < 1e-6);
    CHECK((lifted.pairs[i].p1 - expected[i]).norm() < 1e-6);
    CHECK((lifted.pairs[i].p0 - lifted.pairs[i].p1).norm() < 1e-6);
  }
}

TEST_CASE("lift on a rigidly moved plane matches the ground-truth motion") {
  Vec3 n = Vec3(0.1, 0.05, 1.0).normalized();
  double d = 1.8;
  RigidMotion gt(Quat::from_axis_angle(Vec3(0, 1, 0).normalized(), deg_to_rad(25.0)),
                 Vec3(0.05, -0.02, 0.03));
  // Transformed plane: n1.x = d1.
  Vec3 n1 = gt.rot.rotate(n);
  double d1 = d + n1.dot(gt.trans);

  Camera cam0 = simple_camera(Vec3(0, 0, 0), Vec3(0, 0, 1));
  Camera cam1 = simple_camera(Vec3(-0.3, 0.1, 0.05), Vec3(0, 0, 1));
  Frame f0 = plane_frame(cam0, n, d, 0);
  Frame f1 = plane_frame(cam1, n1, d1, 1);

  Rng rng(42);
  std::vector<Eigen::Vector2d> pix0, pix1;
  std::vector<Vec3> gt0;
  for (int i = 0; i < 300 && gt0.size() < 150; ++i) {
    Vec3 p(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), 0.0);
    p.z() = (d - n.x() * p.x() - n.y() * p.y()) / n.z();
    Vec3 q = gt.apply(p);
    auto pr0 = cam0.project(p);
    auto pr1 = cam1.project(q);
    if (!pr0 || !pr1) continue;
    if (pr0->pixel.minCoeff() < 2 || pr0->pixel.maxCoeff() > 62) continue;
    if (pr1->pixel.minCoeff() < 2 || pr1->pixel.maxCoeff() > 62) continue;
    pix0.push_back(pr0->pixel);
    pix1.push_back(pr1->pixel);
    gt0.push_back(p);
  }
  REQUIRE(gt0.size() == 150);
  LiftResult lifted = lift_matches(pix0, pix1, f0, f1);
  REQUIRE(lifted.pairs.size() == gt0.size());
  for (std::size_t i = 0; i < lifted.pairs.size(); ++i) {
    CHECK((lifted.pairs[i].p0 - gt0[i]).norm() < 1e-6);
    CHECK((lifted.pairs[i].p1 - gt.apply(lifted.pairs[i].p0)).norm() < 1e-6);
  }
}

TEST_CASE("lift drops pairs that hit invalid depth and counts them") {
  Camera cam = simple_camera(Vec3(0, 0, 0), Vec3(0, 0, 1));
  Frame f = plane_frame(cam, Vec3(0, 0, 1), 2.0, 0);
  // Punch a hole in the second frame's depth.
  Frame g = f;
  for (int y = 10; y < 20; ++y)
    for (int x = 10; x < 20; ++x) g.depth.at(x, y) = 0.0f;
  std::vector<Eigen::Vector2d> pix0{{32.0, 32.0}, {15.0, 15.0}, {-5.0, 30.0}};
  std::vector<Eigen::Vector2d> pix1{{32.0, 32.0}, {15.0, 15.0}, {30.0, 30.0}};
  LiftResult lifted = lift_matches(pix0, pix1, f, g);
  CHECK(lifted.pairs.size() == 1);  // hole and out-of-bounds both dropped
  CHECK(lifted.dropped == 2);
  CHECK_THROWS_AS(lift_matches(pix0, {pix1[0]}, f, g), InvalidInputError);
}

namespace {

/// Clustered matches on a rigid body plus displaced outliers. Returns pairs
/// and the ground-truth outlier flags.
std::vector<MatchPair> clustered_matches(Rng& rng, int n_clusters, int per_cluster,
                                         double outlier_rate, double displacement) {
  RigidMotion gt(Quat::from_axis_angle(Vec3(0.3, 1, 0.1).normalized(), deg_to_rad(30)),
                 Vec3(0.1, 0.05, -0.02));
  std::vector<MatchPair> pairs;
  for (int c = 0; c < n_clusters; ++c) {
    Vec3 seed(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.1, 0.1));
    for (int i = 0; i < per_cluster; ++i) {
      // Points within a 4 mm ball: every cluster member is mutually within
      // the default r = 10 mm neighborhood radius.
      Vec3 q(rng.normal(), rng.normal(), rng.normal());
      q = seed + 0.004 * (q / std::max(q.norm(), 1e-9)) * rng.uniform();
      MatchPair mp;
      mp.p0 = q;
      mp.p1 = gt.apply(q);
      pairs.push_back(mp);
    }
  }
  int n_out = int(std::floor(outlier_rate * double(pairs.size()) + 0.5));
  for (int k = 0; k < n_out; ++k) {
    int idx = int(rng.below(pairs.size()));
    while (pairs[std::size_t(idx)].outlier_gt) idx = int(rng.below(pairs.size()));
    Vec3 dir(rng.normal(), rng.normal(), rng.normal());
    pairs[std::size_t(idx)].p1 += displacement * dir / std::max(dir.norm(), 1e-9);
    pairs[std::size_t(idx)].outlier_gt = true;
  }
  return pairs;
}

}  // namespace

TEST_CASE("locality filter: documented 100 + 10 case") {
  // 110 matches in one dense patch; 10 ending points displaced by 0.1 m.
  Rng rng(43);
  auto pairs = clustered_matches(rng, 2, 55, 10.0 / 110.0, 0.1);
  int n_out = 0;
  for (auto& p : pairs) n_out += p.outlier_gt ? 1 : 0;
  REQUIRE(n_out == 10);
  auto valid = locality_filter(pairs);
  int outliers_kept = 0, inliers_kept = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].outlier_gt && valid[i]) ++outliers_kept;
    if (!pairs[i].outlier_gt && valid[i]) ++inliers_kept;
  }
  CHECK(outliers_kept == 0);   // all 10 outliers invalid
  CHECK(inliers_kept >= 99);   // at most one inlier lost collaterally
}

TEST_CASE("locality filter: recall and precision at 10 percent outliers") {
  Rng rng(44);
  auto pairs = clustered_matches(rng, 12, 50, 0.10, 0.12);
  auto valid = locality_filter(pairs);
  int tp = 0, fn = 0, kept_true = 0, kept_false = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].outlier_gt) {
      valid[i] ? ++fn : ++tp;  // recall counts rejected outliers
    } else {
      valid[i] ? ++kept_true : ++kept_false;
    }
  }
  double recall = double(tp) / double(tp + fn);
  int kept_outliers = fn;
  double precision = double(kept_true) / double(kept_true + kept_outliers);
  CHECK(recall >= 0.95);
  CHECK(precision >= 0.95);
  (void)kept_false;
}

TEST_CASE("locality filter: isolated matches are trivially valid") {
  std::vector<MatchPair> pairs(3);
  pairs[0].p0 = Vec3(0, 0, 0);
  pairs[0].p1 = Vec3(5, 5, 5);  // wildly moved, but alone in its neighborhood
  pairs[1].p0 = Vec3(1, 0, 0);
  pairs[1].p1 = Vec3(1, 0, 0);
  pairs[2].p0 = Vec3(0, 1, 0);
  pairs[2].p1 = Vec3(0, 1, 0);
  auto valid = locality_filter(pairs);
  CHECK(valid == std::vector<char>({1, 1, 1}));
}

TEST_CASE("locality filter is order-invariant and deterministic") {
  Rng rng(45);
  auto pairs = clustered_matches(rng, 6, 40, 0.1, 0.15);
  auto valid1 = locality_filter(pairs);
  auto valid2 = locality_filter(pairs);
  CHECK(valid1 == valid2);

  std::vector<int> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  rng.shuffle(order);
  std::vector<MatchPair> shuffled;
  for (int i : order) shuffled.push_back(pairs[std::size_t(i)]);
  auto valid3 = locality_filter(shuffled);
  for (std::size_t k = 0; k < order.size(); ++k)
    CHECK(valid3[k] == valid1[std::size_t(order[k])]);
}

TEST_CASE("locality filter rejects bad radii") {
  std::vector<MatchPair> pairs(1);
  CHECK_THROWS_AS(locality_filter(pairs, 0.0, 0.02), InvalidInputError);
  CHECK_THROWS_AS(locality_filter(pairs, 0.01, -1.0), InvalidInputError);
}
