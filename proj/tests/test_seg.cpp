#include <doctest.h>

#include "artic/checks.hpp"
#include "artic/hungarian.hpp"
#include "artic/rng.hpp"
#include "artic/seg.hpp"

using namespace artic;

namespace {

Camera wall_camera(double cam_x = 0.0) {
  Mat4 extr = Mat4::Identity();
  extr(0, 3) = -cam_x;  // world -> camera: shift so the camera sits at x = cam_x
  return Camera(64, 64, 60.0, 60.0, 32.0, 32.0, extr);
}

/// Flat wall at z = 2 partitioned into world-x strips; labels[i] applies on
/// [edges[i], edges[i+1]). Depth is exact and constant.
Frame wall_frame(const Camera& cam, const std::vector<double>& edges,
                 const std::vector<int>& strip_labels, int view, int state = 0) {
  Frame f;
  f.camera = cam;
  f.view = view;
  f.state = state;
  f.rgb = Image<Rgb8>(cam.width(), cam.height());
  f.depth = Image<float>(cam.width(), cam.height(), 0.0f);
  f.label = Image<std::uint16_t>(cam.width(), cam.height(), 0);
  for (int y = 0; y < cam.height(); ++y)
    for (int x = 0; x < cam.width(); ++x) {
      Vec3 w = cam.backproject(Eigen::Vector2d(x + 0.5, y + 0.5), 2.0);
      if (std::abs(w.y()) > 0.4) continue;
      for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        if (w.x() >= edges[s] && w.x() < edges[s + 1]) {
          f.label.at(x, y) = std::uint16_t(strip_labels[s]);
          f.depth.at(x, y) = 2.0f;
          break;
        }
      }
    }
  return f;
}

}  // namespace

TEST_CASE("hungarian matches brute force on random matrices up to 6x6") {
  Rng rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    int rows = 1 + rng.index(6), cols = 1 + rng.index(6);
    Eigen::MatrixXd s(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) s(i, j) = rng.uniform();
    std::vector<int> brute_sol;
    double brute = checks::brute_force_max_matching(s, brute_sol);
    double fast = 0.0;
    for (const WeightedPair& p : max_weight_matching(s)) fast += p.weight;
    CHECK(fast == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("hungarian on integer-valued ties stays optimal") {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + rng.index(5);
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s(i, j) = double(rng.index(3));
    std::vector<int> brute_sol;
    double brute = checks::brute_force_max_matching(s, brute_sol);
    double fast = 0.0;
    for (const WeightedPair& p : max_weight_matching(s)) fast += p.weight;
    CHECK(fast == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("iou_matrix on handcrafted masks") {
  Image<std::uint16_t> a(8, 4, 0), b(8, 4, 0);
  // Label 1: disjoint halves. Label 2 in a overlaps label 2 in b by half.
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x) {
      a.at(x, y) = 1;
      b.at(x + 4, y) = 1;
    }
  for (int x = 0; x < 4; ++x) a.at(x, 3) = 2;
  for (int x = 2; x < 6; ++x) b.at(x, 3) = 2;
  Eigen::MatrixXd iou = iou_matrix(a, 2, b, 2);
  CHECK(iou(0, 0) == 0.0);                                 // disjoint
  CHECK(iou(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));  // half overlap
  CHECK(iou(0, 1) == 0.0);
  Eigen::MatrixXd self = iou_matrix(a, 2, a, 2);
  CHECK(self(0, 0) == 1.0);
  CHECK(self(1, 1) == 1.0);
  CHECK(self(0, 1) == 0.0);
}

TEST_CASE("match_views keeps only pairs above the IoU floor") {
  Eigen::MatrixXd iou(2, 3);
  iou << 0.9, 0.05, 0.0,
         0.1, 0.25, 0.0;
  auto matches = match_views(iou, 0.3);
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].label_a == 1);
  CHECK(matches[0].label_b == 1);
  CHECK(matches[0].iou == doctest::Approx(0.9));
  auto loose = match_views(iou, 0.2);
  CHECK(loose.size() == 2);  // 2->2 at 0.25 now survives
}

TEST_CASE("reproject_mask onto the same camera is the identity") {
  Camera cam = wall_camera();
  Frame f = wall_frame(cam, {-0.6, 0.0, 0.6}, {1, 2}, 0);
  ReprojectedMask rm = reproject_mask(f.label, f.depth, cam, cam);
  int diff = 0;
  for (std::size_t i = 0; i < f.label.data.size(); ++i)
    if (f.depth.data[i] > 0 && rm.labels.data[i] != f.label.data[i]) ++diff;
  CHECK(diff == 0);
  // Depth buffer carries the source depth.
  CHECK(rm.depth.at(32, 32) == doctest::Approx(2.0));
}

TEST_CASE("build_part_graph reconstructs parts across permuted views") {
  // Three strips of distinct area; widest must become global id 1.
  std::vector<double> edges{-0.6, 0.0, 0.4, 0.6};
  Rng rng(33);
  std::vector<Frame> frames;
  std::vector<std::vector<int>> perms;
  for (int v = 0; v < 6; ++v) {
    std::vector<int> perm{1, 2, 3};
    rng.shuffle(perm);
    perms.push_back(perm);
    frames.push_back(wall_frame(wall_camera(0.002 * v), edges, perm, v));
  }
  PartGraph g = build_part_graph(frames, 4, 0.3);
  CHECK(g.n_components == 3);

  // Per-pixel global relabeling must agree with the ground-truth strips
  // perfectly (ARI = 1), and strip 0 (widest) must map to global id 1.
  std::vector<int> got, want;
  for (int v = 0; v < 6; ++v) {
    Frame gt = wall_frame(wall_camera(0.002 * v), edges, {1, 2, 3}, v);
    for (std::size_t i = 0; i < gt.label.data.size(); ++i) {
      if (gt.label.data[i] == 0) continue;
      want.push_back(gt.label.data[i]);
      got.push_back(g.local_to_global[std::size_t(v)][frames[std::size_t(v)].label.data[i]]);
    }
  }
  CHECK(checks::adjusted_rand_index(got, want) == doctest::Approx(1.0));
  for (int v = 0; v < 6; ++v)
    CHECK(g.local_to_global[std::size_t(v)][std::size_t(perms[std::size_t(v)][0])] == 1);
}

TEST_CASE("single-part views form one component") {
  std::vector<Frame> frames;
  for (int v = 0; v < 3; ++v)
    frames.push_back(wall_frame(wall_camera(0.002 * v), {-0.5, 0.5}, {1}, v));
  PartGraph g = build_part_graph(frames, 2, 0.3);
  CHECK(g.n_components == 1);
  CHECK(g.local_to_global[0][1] == 1);
}

TEST_CASE("views that never overlap stay separate components with a warning") {
  // Two cameras looking at disjoint wall regions: reprojections miss, IoU 0.
  std::vector<Frame> frames;
  frames.push_back(wall_frame(wall_camera(0.0), {-0.6, -0.2}, {1}, 0));
  frames.push_back(wall_frame(wall_camera(0.0), {0.2, 0.6}, {1}, 1));
  PartGraph g = build_part_graph(frames, 1, 0.3);
  CHECK(g.n_components == 2);
  bool warned = false;
  for (const auto& w : g.warnings) warned = warned || w.find("single view") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("conflicting merges are skipped and reported") {
  // View 0 splits the wall in two; views 1 and 2 each cover one side plus a
  // sliver of the other. The weak 1<->2 edge would fuse both sides into one
  // part and must be refused.
  std::vector<Frame> frames;
  frames.push_back(wall_frame(wall_camera(0.000), {-0.5, 0.0, 0.5}, {1, 2}, 0));
  frames.push_back(wall_frame(wall_camera(0.001), {-0.5, 0.1}, {1}, 1));
  frames.push_back(wall_frame(wall_camera(0.002), {-0.1, 0.5}, {1}, 2));
  PartGraph g = build_part_graph(frames, 2, 0.15);
  CHECK(g.n_components == 2);
  bool skipped = false;
  for (const auto& e : g.edges) skipped = skipped || !e.applied;
  CHECK(skipped);
  bool warned = false;
  for (const auto& w : g.warnings)
    warned = warned || w.find("conflicting merge") != std::string::npos;
  CHECK(warned);
  // Both sides of view 0 keep distinct global ids.
  CHECK(g.local_to_global[0][1] != g.local_to_global[0][2]);
}

TEST_CASE("align_states maps state-1 parts by match majority vote") {
  std::vector<double> edges{-0.6, 0.0, 0.4, 0.6};
  Rng rng(34);
  std::vector<Frame> frames0, frames1;
  for (int v = 0; v < 4; ++v) {
    std::vector<int> p0{1, 2, 3}, p1{1, 2, 3};
    rng.shuffle(p0);
    rng.shuffle(p1);
    frames0.push_back(wall_frame(wall_camera(0.002 * v), edges, p0, v, 0));
    frames1.push_back(wall_frame(wall_camera(0.002 * v), edges, p1, v, 1));
  }
  // Matches: identical cameras and geometry, so the same pixel corresponds.
  std::vector<MatchRow> matches;
  for (int i = 0; i < 200; ++i) {
    MatchRow m;
    m.view0 = m.view1 = rng.index(4);
    m.pix0 = m.pix1 = Eigen::Vector2d(rng.uniform(2.0, 62.0), rng.uniform(2.0, 62.0));
    matches.push_back(m);
  }
  ConsistentScene cs = harmonize_labels(frames0, frames1, matches);
  CHECK(cs.n_parts == 3);
  // Same areas both states: alignment must be the identity map.
  for (int g1 = 1; g1 <= 3; ++g1) CHECK(cs.map_1_to_0[std::size_t(g1)] == g1);
  // Relabeled frames agree pixelwise across states.
  for (int v = 0; v < 4; ++v)
    CHECK(cs.frames0[std::size_t(v)].label == cs.frames1[std::size_t(v)].label);
}

TEST_CASE("harmonized labels are invariant to the input permutation") {
  std::vector<double> edges{-0.6, -0.1, 0.3, 0.6};
  std::vector<Frame> frames_a, frames_b;
  Rng rng(35);
  for (int v = 0; v < 5; ++v) {
    std::vector<int> perm{1, 2, 3};
    rng.shuffle(perm);
    frames_a.push_back(wall_frame(wall_camera(0.002 * v), edges, perm, v));
    frames_b.push_back(wall_frame(wall_camera(0.002 * v), edges, {1, 2, 3}, v));
  }
  PartGraph ga = build_part_graph(frames_a, 3, 0.3);
  PartGraph gb = build_part_graph(frames_b, 3, 0.3);
  CHECK(ga.n_components == gb.n_components);
  // The recovered global labeling is identical pixelwise regardless of how
  // the per-view local ids were permuted.
  for (int v = 0; v < 5; ++v)
    for (std::size_t i = 0; i < frames_a[std::size_t(v)].label.data.size(); ++i) {
      int la = frames_a[std::size_t(v)].label.data[i];
      int lb = frames_b[std::size_t(v)].label.data[i];
      CHECK(ga.local_to_global[std::size_t(v)][std::size_t(la)] ==
            gb.local_to_global[std::size_t(v)][std::size_t(lb)]);
    }
}
