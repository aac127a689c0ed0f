#pragma once

#include <vector>

#include "artic/motion_field.hpp"

namespace artic {

/// The optimized scene: canonical-state primitives plus one motion basis
/// per part. `knn` holds each primitive's k nearest canonical neighbors,
/// built once after initialization and frozen (geometry does not move
/// during motion learning). `part_to_gt` maps basis index to the
/// generator's ground-truth part id when that is known (evaluation only).
struct SceneModel {
  std::vector<Primitive> prims;
  MotionField field;
  std::vector<std::vector<int>> knn;
  int canonical_state = 0;
  std::vector<int> part_to_gt;

  int n_parts() const { return field.n_parts(); }
  int n_prims() const { return int(prims.size()); }
};

}  // namespace artic
