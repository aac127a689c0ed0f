#include "artic/seg.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "artic/error.hpp"
#include "artic/hungarian.hpp"

namespace artic {

ReprojectedMask reproject_mask(const Image<std::uint16_t>& src_labels,
                               const Image<float>& src_depth,
                               const Camera& src_cam, const Camera& dst_cam) {
  if (src_labels.width != src_depth.width || src_labels.height != src_depth.height)
    throw InvalidInputError("reproject_mask: label/depth size mismatch");
  ReprojectedMask out;
  out.labels = Image<std::uint16_t>(dst_cam.width(), dst_cam.height(), 0);
  out.depth = Image<float>(dst_cam.width(), dst_cam.height(), 0.0f);
  for (int y = 0; y < src_labels.height; ++y) {
    for (int x = 0; x < src_labels.width; ++x) {
      std::uint16_t lab = src_labels.at(x, y);
      float d = src_depth.at(x, y);
      if (lab == 0 || d <= 0.0f) continue;
      Vec3 world = src_cam.backproject(Eigen::Vector2d(x + 0.5, y + 0.5), d);
      auto pr = dst_cam.project(world);
      if (!pr) continue;
      int ix = int(std::floor(pr->pixel.x()));
      int iy = int(std::floor(pr->pixel.y()));
      if (!out.labels.inside(ix, iy)) continue;
      float& zb = out.depth.at(ix, iy);
      if (zb <= 0.0f || pr->depth < zb) {
        zb = float(pr->depth);
        out.labels.at(ix, iy) = lab;
      }
    }
  }
  return out;
}

Eigen::MatrixXd iou_matrix(const Image<std::uint16_t>& reprojected, int n_src,
                           const Image<std::uint16_t>& dst, int n_dst) {
  if (reprojected.width != dst.width || reprojected.height != dst.height)
    throw InvalidInputError("iou_matrix: image size mismatch");
  Eigen::VectorXd area_a = Eigen::VectorXd::Zero(n_src);
  Eigen::VectorXd area_b = Eigen::VectorXd::Zero(n_dst);
  Eigen::MatrixXd inter = Eigen::MatrixXd::Zero(n_src, n_dst);
  for (std::size_t i = 0; i < reprojected.data.size(); ++i) {
    int a = reprojected.data[i], b = dst.data[i];
    if (a > n_src || b > n_dst)
      throw InvalidInputError("iou_matrix: label exceeds declared count");
    if (a > 0) area_a(a - 1) += 1;
    if (b > 0) area_b(b - 1) += 1;
    if (a > 0 && b > 0) inter(a - 1, b - 1) += 1;
  }
  Eigen::MatrixXd iou = Eigen::MatrixXd::Zero(n_src, n_dst);
  for (int a = 0; a < n_src; ++a)
    for (int b = 0; b < n_dst; ++b) {
      double uni = area_a(a) + area_b(b) - inter(a, b);
      iou(a, b) = uni > 0.0 ? inter(a, b) / uni : 0.0;
    }
  return iou;
}

std::vector<LabelMatch> match_views(const Eigen::MatrixXd& iou, double min_iou) {
  std::vector<LabelMatch> out;
  for (const WeightedPair& wp : max_weight_matching(iou)) {
    if (wp.weight < min_iou) continue;
    out.push_back(LabelMatch{wp.row + 1, wp.col + 1, wp.weight});
  }
  std::sort(out.begin(), out.end(), [](const LabelMatch& a, const LabelMatch& b) {
    return a.label_a < b.label_a;
  });
  return out;
}

namespace {

/// Union-find whose components refuse to hold two labels of the same view.
class ConflictAverseForest {
 public:
  explicit ConflictAverseForest(const std::vector<int>& labels_per_view) {
    for (std::size_t v = 0; v < labels_per_view.size(); ++v)
      for (int l = 1; l <= labels_per_view[v]; ++l) {
        node_id_[{int(v), l}] = int(parent_.size());
        parent_.push_back(int(parent_.size()));
        views_.push_back({{int(v), l}});
      }
  }

  int find(int a) {
    while (parent_[std::size_t(a)] != a) {
      parent_[std::size_t(a)] = parent_[std::size_t(parent_[std::size_t(a)])];
      a = parent_[std::size_t(a)];
    }
    return a;
  }

  int id(int view_index, int label) const { return node_id_.at({view_index, label}); }

  /// Returns false (and leaves the forest untouched) on a same-view conflict.
  bool unite(int a, int b) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return true;
    if (views_[std::size_t(ra)].size() < views_[std::size_t(rb)].size()) std::swap(ra, rb);
    for (const auto& [view, label] : views_[std::size_t(rb)]) {
      auto it = std::find_if(views_[std::size_t(ra)].begin(), views_[std::size_t(ra)].end(),
                             [&](const std::pair<int, int>& p) { return p.first == view; });
      if (it != views_[std::size_t(ra)].end() && it->second != label) return false;
    }
    for (const auto& vl : views_[std::size_t(rb)]) views_[std::size_t(ra)].push_back(vl);
    views_[std::size_t(rb)].clear();
    parent_[std::size_t(rb)] = ra;
    return true;
  }

  const std::vector<std::pair<int, int>>& members(int root) { return views_[std::size_t(root)]; }

 private:
  std::map<std::pair<int, int>, int> node_id_;
  std::vector<int> parent_;
  std::vector<std::vector<std::pair<int, int>>> views_;
};

}  // namespace

PartGraph build_part_graph(const std::vector<Frame>& frames, int k_views, double min_iou) {
  if (frames.empty()) throw InvalidInputError("build_part_graph: no frames");
  if (k_views < 1) throw InvalidInputError("build_part_graph: k_views must be >= 1");
  const int n_views = int(frames.size());

  PartGraph g;
  g.view_ids.resize(std::size_t(n_views));
  std::vector<int> n_labels(std::size_t(n_views), 0);
  std::vector<std::vector<double>> area;
  area.resize(std::size_t(n_views));
  for (int v = 0; v < n_views; ++v) {
    g.view_ids[std::size_t(v)] = frames[std::size_t(v)].view;
    n_labels[std::size_t(v)] = frames[std::size_t(v)].n_labels();
    area[std::size_t(v)].assign(std::size_t(n_labels[std::size_t(v)]) + 1, 0.0);
    for (auto lab : frames[std::size_t(v)].label.data)
      if (lab > 0) area[std::size_t(v)][lab] += 1.0;
    for (int l = 1; l <= n_labels[std::size_t(v)]; ++l)
      if (area[std::size_t(v)][std::size_t(l)] == 0.0)
        g.warnings.push_back("view " + std::to_string(frames[std::size_t(v)].view) +
                             ": mask labels are not dense (label " + std::to_string(l) +
                             " empty)");
  }

  // Anchor: most distinct labels, ties toward the lower view index.
  int anchor = 0;
  for (int v = 1; v < n_views; ++v)
    if (n_labels[std::size_t(v)] > n_labels[std::size_t(anchor)]) anchor = v;
  g.anchor_view = frames[std::size_t(anchor)].view;

  // Candidate edges from each view against its k nearest views.
  for (int v = 0; v < n_views; ++v) {
    std::vector<std::pair<double, int>> order;
    for (int w = 0; w < n_views; ++w) {
      if (w == v) continue;
      order.push_back({(frames[std::size_t(v)].camera.center() -
                        frames[std::size_t(w)].camera.center()).norm(),
                       w});
    }
    std::sort(order.begin(), order.end());
    int take = std::min<int>(k_views, int(order.size()));
    for (int t = 0; t < take; ++t) {
      int w = order[std::size_t(t)].second;
      ReprojectedMask rm = reproject_mask(frames[std::size_t(v)].label,
                                          frames[std::size_t(v)].depth,
                                          frames[std::size_t(v)].camera,
                                          frames[std::size_t(w)].camera);
      Eigen::MatrixXd iou = iou_matrix(rm.labels, n_labels[std::size_t(v)],
                                       frames[std::size_t(w)].label, n_labels[std::size_t(w)]);
      for (const LabelMatch& m : match_views(iou, min_iou))
        g.edges.push_back(PartGraphEdge{v, m.label_a, w, m.label_b, m.iou});
    }
  }

  // Merge strongest evidence first; refuse same-view conflicts.
  std::vector<int> edge_order(g.edges.size());
  std::iota(edge_order.begin(), edge_order.end(), 0);
  std::stable_sort(edge_order.begin(), edge_order.end(), [&](int a, int b) {
    return g.edges[std::size_t(a)].iou > g.edges[std::size_t(b)].iou;
  });
  ConflictAverseForest forest(n_labels);
  for (int ei : edge_order) {
    PartGraphEdge& e = g.edges[std::size_t(ei)];
    if (!forest.unite(forest.id(e.view_a, e.label_a), forest.id(e.view_b, e.label_b))) {
      e.applied = false;
      g.warnings.push_back(
          "conflicting merge skipped: view " + std::to_string(frames[std::size_t(e.view_a)].view) +
          " label " + std::to_string(e.label_a) + " vs view " +
          std::to_string(frames[std::size_t(e.view_b)].view) + " label " +
          std::to_string(e.label_b));
    }
  }

  // Components ordered by descending pixel area; largest becomes id 1.
  struct Comp {
    int root;
    double area;
    std::pair<int, int> first_member;
  };
  std::vector<Comp> comps;
  for (int v = 0; v < n_views; ++v)
    for (int l = 1; l <= n_labels[std::size_t(v)]; ++l) {
      int root = forest.find(forest.id(v, l));
      if (forest.members(root).empty()) continue;  // merged away
      bool seen = false;
      for (const Comp& c : comps) seen = seen || c.root == root;
      if (seen) continue;
      Comp c{root, 0.0, {n_views, 0}};
      for (const auto& [mv, ml] : forest.members(root)) {
        c.area += area[std::size_t(mv)][std::size_t(ml)];
        c.first_member = std::min(c.first_member, {mv, ml});
      }
      comps.push_back(c);
    }
  std::sort(comps.begin(), comps.end(), [](const Comp& a, const Comp& b) {
    if (a.area != b.area) return a.area > b.area;
    return a.first_member < b.first_member;
  });

  g.n_components = int(comps.size());
  g.local_to_global.resize(std::size_t(n_views));
  for (int v = 0; v < n_views; ++v)
    g.local_to_global[std::size_t(v)].assign(std::size_t(n_labels[std::size_t(v)]) + 1, 0);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    int members_in_one_view = 0;
    for (const auto& [mv, ml] : forest.members(comps[c].root)) {
      g.local_to_global[std::size_t(mv)][std::size_t(ml)] = int(c) + 1;
      ++members_in_one_view;
    }
    if (members_in_one_view == 1)
      g.warnings.push_back("component " + std::to_string(c + 1) +
                           " is supported by a single view");
  }
  return g;
}

std::vector<int> align_states(const PartGraph& graph0, const PartGraph& graph1,
                              const std::vector<Frame>& frames0,
                              const std::vector<Frame>& frames1,
                              const std::vector<MatchRow>& matches,
                              std::vector<std::string>* warnings) {
  auto frame_index = [](const std::vector<Frame>& frames, int view) {
    for (std::size_t i = 0; i < frames.size(); ++i)
      if (frames[i].view == view) return int(i);
    throw InvalidInputError("align_states: match references an unknown view");
  };
  Eigen::MatrixXd votes =
      Eigen::MatrixXd::Zero(graph1.n_components + 1, graph0.n_components + 1);
  for (const MatchRow& m : matches) {
    int f0 = frame_index(frames0, m.view0);
    int f1 = frame_index(frames1, m.view1);
    const Frame& a = frames0[std::size_t(f0)];
    const Frame& b = frames1[std::size_t(f1)];
    int x0 = int(std::floor(m.pix0.x())), y0 = int(std::floor(m.pix0.y()));
    int x1 = int(std::floor(m.pix1.x())), y1 = int(std::floor(m.pix1.y()));
    if (!a.label.inside(x0, y0) || !b.label.inside(x1, y1)) continue;
    int g0 = graph0.global_of(f0, a.label.at(x0, y0));
    int g1 = graph1.global_of(f1, b.label.at(x1, y1));
    if (g0 == 0 || g1 == 0) continue;
    votes(g1, g0) += 1.0;
  }
  std::vector<int> map_1_to_0(std::size_t(graph1.n_components) + 1, 0);
  for (int g1 = 1; g1 <= graph1.n_components; ++g1) {
    int best = 0;
    for (int g0 = 1; g0 <= graph0.n_components; ++g0)
      if (votes(g1, g0) > (best == 0 ? 0.0 : votes(g1, best))) best = g0;
    map_1_to_0[std::size_t(g1)] = best;
    if (best == 0 && warnings)
      warnings->push_back("state-1 part " + std::to_string(g1) +
                          " has no cross-state votes; dropped to background");
  }
  if (warnings) {
    for (int a = 1; a <= graph1.n_components; ++a)
      for (int b = a + 1; b <= graph1.n_components; ++b)
        if (map_1_to_0[std::size_t(a)] != 0 &&
            map_1_to_0[std::size_t(a)] == map_1_to_0[std::size_t(b)])
          warnings->push_back("state-1 parts " + std::to_string(a) + " and " +
                              std::to_string(b) + " both map to state-0 part " +
                              std::to_string(map_1_to_0[std::size_t(a)]));
  }
  return map_1_to_0;
}

ConsistentScene harmonize_labels(const std::vector<Frame>& frames0,
                                 const std::vector<Frame>& frames1,
                                 const std::vector<MatchRow>& matches,
                                 int k_views, double min_iou) {
  ConsistentScene out;
  out.graph0 = build_part_graph(frames0, k_views, min_iou);
  out.graph1 = build_part_graph(frames1, k_views, min_iou);
  out.map_1_to_0 = align_states(out.graph0, out.graph1, frames0, frames1, matches,
                                &out.warnings);
  out.n_parts = out.graph0.n_components;
  out.frames0 = frames0;
  out.frames1 = frames1;
  for (std::size_t f = 0; f < out.frames0.size(); ++f)
    for (auto& lab : out.frames0[f].label.data)
      lab = std::uint16_t(out.graph0.global_of(int(f), lab));
  for (std::size_t f = 0; f < out.frames1.size(); ++f)
    for (auto& lab : out.frames1[f].label.data)
      lab = std::uint16_t(out.map_1_to_0[std::size_t(out.graph1.global_of(int(f), lab))]);
  for (const auto& w : out.graph0.warnings) out.warnings.push_back("state0: " + w);
  for (const auto& w : out.graph1.warnings) out.warnings.push_back("state1: " + w);
  return out;
}

}  // namespace artic
