#pragma once

#include <string>
#include <vector>

#include "artic/correspond.hpp"
#include "artic/image.hpp"

namespace artic {

struct ReprojectedMask {
  Image<std::uint16_t> labels;  // 0 where no source pixel landed
  Image<float> depth;           // z-buffer used during splatting
};

/// Backproject every labeled source pixel through its depth and splat it
/// into the target camera with nearest-wins z-buffering.
ReprojectedMask reproject_mask(const Image<std::uint16_t>& src_labels,
                               const Image<float>& src_depth,
                               const Camera& src_cam, const Camera& dst_cam);

/// Pairwise IoU between reprojected source masks (rows, labels 1..n_src)
/// and target masks (cols, labels 1..n_dst). Empty-vs-empty pairs score 0.
Eigen::MatrixXd iou_matrix(const Image<std::uint16_t>& reprojected, int n_src,
                           const Image<std::uint16_t>& dst, int n_dst);

struct LabelMatch {
  int label_a = 0, label_b = 0;  // 1-based mask labels
  double iou = 0.0;
};

/// Optimal one-to-one matching of mask labels by IoU; pairs below min_iou
/// are discarded after matching.
std::vector<LabelMatch> match_views(const Eigen::MatrixXd& iou, double min_iou);

struct PartGraphEdge {
  int view_a = 0, label_a = 0, view_b = 0, label_b = 0;
  double iou = 0.0;
  bool applied = true;  // false when skipped to avoid a same-view conflict
};

/// Result of intra-state mask consistency: a global id for every (view,
/// local label) node. Global ids are 1..n_components ordered by descending
/// total pixel area, so id 1 is the static part by convention.
struct PartGraph {
  int anchor_view = 0;
  int n_components = 0;
  std::vector<int> view_ids;                      // frame order
  std::vector<std::vector<int>> local_to_global;  // [frame][local]; [*][0] = 0
  std::vector<PartGraphEdge> edges;
  std::vector<std::string> warnings;

  int global_of(int frame_index, int local_label) const {
    if (local_label <= 0) return 0;
    return local_to_global[std::size_t(frame_index)][std::size_t(local_label)];
  }
};

/// Connect view-local masks of one state into global parts. Each view is
/// matched against its k nearest views by camera-center distance; matched
/// label pairs become edges; connected components become parts. Edges whose
/// union would put two different labels of one view into the same part are
/// skipped and reported, never merged.
PartGraph build_part_graph(const std::vector<Frame>& frames, int k_views = 4,
                           double min_iou = 0.3);

/// Map state-1 global ids onto state-0 global ids by majority vote over the
/// cross-state matches. Index j of the result holds the state-0 id for
/// state-1 id j (0 = unmapped, reported in warnings).
std::vector<int> align_states(const PartGraph& graph0, const PartGraph& graph1,
                              const std::vector<Frame>& frames0,
                              const std::vector<Frame>& frames1,
                              const std::vector<MatchRow>& matches,
                              std::vector<std::string>* warnings = nullptr);

/// Full preprocessing: per-state part graphs, cross-state alignment, and
/// frames relabeled into the shared global id space (state-0 convention).
struct ConsistentScene {
  std::vector<Frame> frames0, frames1;  // labels rewritten to global ids
  int n_parts = 0;
  PartGraph graph0, graph1;
  std::vector<int> map_1_to_0;
  std::vector<std::string> warnings;
};

ConsistentScene harmonize_labels(const std::vector<Frame>& frames0,
                                 const std::vector<Frame>& frames1,
                                 const std::vector<MatchRow>& matches,
                                 int k_views = 4, double min_iou = 0.3);

}  // namespace artic
