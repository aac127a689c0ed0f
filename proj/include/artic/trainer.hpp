#pragma once

#include <string>
#include <vector>

#include "artic/correspond.hpp"
#include "artic/losses.hpp"
#include "artic/model.hpp"
#include "artic/seg.hpp"

namespace artic {

/// One per-iteration training-log row. Loss terms that are inactive in the
/// current stage are recorded as zero.
struct TrainLogRow {
  int step = 0;
  std::string stage;  // "warmup" | "soft" | "hard"
  double rgbd = 0.0, sem = 0.0, sparsity = 0.0, traj = 0.0, total = 0.0;
};

struct TrainResult {
  SceneModel model;
  std::vector<TrainLogRow> log;
  std::vector<int> locked;  // bases frozen to identity rotation (prismatic)
  std::vector<std::string> warnings;
};

/// Joint state with the larger movable-part mask area across training
/// frames; ties pick state 0. Labels must already be globally consistent
/// (0 background, 1 static, 2.. movable).
int pick_canonical_state(const std::vector<Frame>& frames0,
                         const std::vector<Frame>& frames1);

/// Primitives sampled from labeled depth pixels of the canonical state:
/// centers backprojected, colors read from the image, logits one-hot at the
/// pixel label, and an identity motion field with one basis per part.
SceneModel init_model(const std::vector<Frame>& canonical_frames, int n_parts,
                      const TrainConfig& cfg,
                      std::vector<std::string>* warnings = nullptr);

/// Staged optimization: warm-up (color on canonical frames), soft blending
/// with the sparsity term, then hard assignment with the trajectory term.
/// Matches are given in state0 -> state1 orientation and are re-oriented to
/// canonical -> other internally. Deterministic for a fixed config.
TrainResult train_model(const ConsistentScene& scene,
                        const std::vector<MatchPair>& matches,
                        const TrainConfig& cfg);

}  // namespace artic
